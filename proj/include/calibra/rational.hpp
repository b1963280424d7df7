#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "calibra/errors.hpp"

namespace calibra {

/// Exact rational on 64-bit integers, normalized with positive denominator.
/// Intermediates go through 128-bit products; magnitudes here stay far
/// below the overflow line (binomials up to C(24,12)).
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational of(std::int64_t n, std::int64_t d = 1) {
    CALIBRA_REQUIRE(d != 0, "Rational: zero denominator");
    Rational r{n, d};
    r.normalize();
    return r;
  }

  void normalize() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    if (num == 0) den = 1;
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    const __int128 n = static_cast<__int128>(a.num) * b.den + static_cast<__int128>(b.num) * a.den;
    const __int128 d = static_cast<__int128>(a.den) * b.den;
    return from_wide(n, d);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return a + Rational{-b.num, b.den};
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from_wide(static_cast<__int128>(a.num) * b.num,
                     static_cast<__int128>(a.den) * b.den);
  }
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

  std::string to_string() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
  }

 private:
  static Rational from_wide(__int128 n, __int128 d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 a = n < 0 ? -n : n;
    __int128 b = d;
    while (b != 0) {
      const __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      n /= a;
      d /= a;
    }
    CALIBRA_REQUIRE(n <= INT64_MAX && n >= INT64_MIN && d <= INT64_MAX,
                    "Rational: overflow");
    Rational r{static_cast<std::int64_t>(n), static_cast<std::int64_t>(d)};
    if (r.num == 0) r.den = 1;
    return r;
  }
};

}  // namespace calibra
