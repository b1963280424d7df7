#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "calibra/errors.hpp"

namespace calibra {

/// Multi-index machinery for dense alternating forms.
///
/// A degree-k multi-index is a strictly increasing tuple of k indices in
/// {0, ..., d-1}. Tuples are ranked by the combinatorial number system
/// (combinadics): rank(i_1 < ... < i_k) = sum_j C(i_j, j). The rank is
/// independent of the ambient dimension and the first C(d,k) ranks are
/// exactly the tuples contained in {0, ..., d-1}, so a dense coefficient
/// vector of length C(d,k) is addressed directly by rank. All signs are
/// computed by counting inversions; no hash maps anywhere.

inline constexpr int kBinomialMax = 40;

namespace detail {
consteval std::array<std::array<std::int64_t, kBinomialMax + 1>, kBinomialMax + 1>
make_binomial_table() {
  std::array<std::array<std::int64_t, kBinomialMax + 1>, kBinomialMax + 1> t{};
  for (int n = 0; n <= kBinomialMax; ++n) {
    t[n][0] = 1;
    for (int k = 1; k <= n; ++k)
      t[n][k] = t[n - 1][k - 1] + (k <= n - 1 ? t[n - 1][k] : 0);
  }
  return t;
}
inline constexpr auto kBinomialTable = make_binomial_table();
}  // namespace detail

/// C(n, k) as an exact 64-bit integer. Out-of-range k yields 0.
constexpr std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n || n < 0) return 0;
  CALIBRA_REQUIRE(n <= kBinomialMax, "binomial: n exceeds table size");
  return detail::kBinomialTable[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
}

/// Combinadic rank of a strictly increasing tuple.
inline std::int64_t rank_multi_index(std::span<const int> idx) {
  std::int64_t r = 0;
  for (int j = 0; j < static_cast<int>(idx.size()); ++j) {
    CALIBRA_REQUIRE(j == 0 || idx[j] > idx[j - 1],
                    "rank_multi_index: indices must be strictly increasing");
    r += binomial(idx[j], j + 1);
  }
  return r;
}

/// Inverse of rank_multi_index; writes k indices into idx_out.
inline void unrank_multi_index(std::int64_t rank, int k, std::span<int> idx_out) {
  CALIBRA_REQUIRE(static_cast<int>(idx_out.size()) >= k, "unrank_multi_index: output too small");
  for (int j = k; j >= 1; --j) {
    // largest c with C(c, j) <= rank
    int c = j - 1;
    while (binomial(c + 1, j) <= rank) ++c;
    idx_out[j - 1] = c;
    rank -= binomial(c, j);
  }
}

/// Sign of the permutation that sorts the concatenation (a, b) of two
/// disjoint increasing tuples, i.e. (-1)^{#{(x,y) in a x b : x > y}}.
/// Returns 0 if the tuples intersect.
inline int shuffle_sign(std::span<const int> a, std::span<const int> b) {
  int inversions = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return 0;
    if (a[i] < b[j]) {
      ++i;
    } else {
      inversions += static_cast<int>(a.size() - i);
      ++j;
    }
  }
  return (inversions % 2 == 0) ? 1 : -1;
}

/// Merge two disjoint increasing tuples into one increasing tuple.
inline void merge_multi_index(std::span<const int> a, std::span<const int> b,
                              std::span<int> out) {
  std::size_t i = 0, j = 0, o = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i] < b[j]))
      out[o++] = a[i++];
    else
      out[o++] = b[j++];
  }
}

/// Invoke fn(rank, tuple) for every degree-k multi-index inside {0..d-1},
/// in rank order.
template <class Fn>
void for_each_multi_index(int d, int k, Fn&& fn) {
  const std::int64_t count = binomial(d, k);
  std::array<int, kBinomialMax> buf{};
  for (std::int64_t r = 0; r < count; ++r) {
    unrank_multi_index(r, k, std::span<int>(buf.data(), static_cast<std::size_t>(k)));
    fn(r, std::span<const int>(buf.data(), static_cast<std::size_t>(k)));
  }
}

}  // namespace calibra
