#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "calibra/comass.hpp"
#include "calibra/suite.hpp"

using namespace calibra;

namespace {
Eigen::VectorXd lam2(double a, double b) {
  Eigen::VectorXd l(2);
  l << a, b;
  return l;
}
}  // namespace

TEST_CASE("f(theta, tau, r) pinned values") {
  CHECK(f_theta_tau(0.0, 0.7, 2) == doctest::Approx(1.0));
  CHECK(f_theta_tau(0.0, 0.0, 5) == doctest::Approx(1.0));
  // r = 2 collapses to cos^2 + tau^2 sin^2
  for (double th : {0.3, 1.1}) {
    const double c = std::cos(th), s = std::sin(th);
    CHECK(f_theta_tau(th, 0.8, 2) == doctest::Approx(c * c + 0.64 * s * s));
  }
  // r = 3 at theta = pi/2: only the l = 3 term survives (cos factors kill
  // l = 2), leaving tau^3 (3-1) C(3,3) = 2 tau^3; the weights of all terms
  // at tau = 1/2 sum to 3/4 + 1/4 = 1, which is the crude sum identity.
  CHECK(f_theta_tau(std::numbers::pi / 2.0, 0.5, 3) == doctest::Approx(0.25));
  CHECK(crude_sum_identity(3) == Rational::of(1));
  CHECK_THROWS_AS(f_theta_tau(0.1, 0.5, 1), SpecError);
}

TEST_CASE("upper bound") {
  // all-zero singular values
  auto ub = upper_bound(Eigen::VectorXd::Zero(3), 0);
  CHECK(ub.value == doctest::Approx(1.0));
  CHECK(ub.theta_star == 0.0);

  // r = 2, lambda = (1,1): cos^2 + sin^2 = 1 for every angle
  ub = upper_bound(lam2(1.0, 1.0), 2);
  CHECK(ub.value == doctest::Approx(1.0).epsilon(1e-12));

  // r = 2, lambda = (2,2): max is 4 at theta = pi/2
  ub = upper_bound(lam2(2.0, 2.0), 2);
  CHECK(ub.value == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(ub.theta_star == doctest::Approx(std::numbers::pi / 2.0).epsilon(1e-6));

  // r = 3 under the crude threshold stays at 1
  Eigen::VectorXd l3(3);
  l3 << 0.5, 0.5, 0.1;
  CHECK(upper_bound(l3, 3).value <= 1.0 + 1e-12);
}

TEST_CASE("lower bound on the plain volume form") {
  Eigen::VectorXd lam = Eigen::VectorXd::Zero(2);
  const ThetaForm th = theta_model(lam, 2, 2);
  const ComassEstimate est = lower_bound(th, 4, 0);
  CHECK(est.lower == doctest::Approx(1.0).epsilon(1e-12));
  // witness is the coordinate x-plane (first deterministic seed wins ties)
  Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(4, 2);
  expect(0, 0) = 1.0;
  expect(1, 1) = 1.0;
  CHECK((est.witness.columns - expect).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(est.witness.gram_error() < 1e-10);
  CHECK(evaluate(th.form, est.witness.columns) == doctest::Approx(est.lower).epsilon(1e-10));
}

TEST_CASE("reversed normal plane witnesses the violation") {
  const ThetaForm th = theta_model(lam2(2.0, 2.0), 2, 2);
  const ComassEstimate est = lower_bound(th, 16, 0);
  CHECK(est.lower >= 4.0 - 1e-6);
  // bracket agrees: upper bound is also 4
  const ComassEstimate full = estimate_comass(th, lam2(2.0, 2.0), 2, 16, 0);
  CHECK(full.upper == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(full.lower <= full.upper + 1e-7);
}

TEST_CASE("calibrated boundary case lambda = (1,1)") {
  const ThetaForm th = theta_model(lam2(1.0, 1.0), 2, 2);
  const ComassEstimate est = estimate_comass(th, lam2(1.0, 1.0), 2, 16, 0);
  CHECK(est.lower == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(est.upper == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("stiefel reduction basics") {
  // all-zero singular values: maximize det(U) alone
  CHECK(stiefel_lower_bound(Eigen::VectorXd::Zero(2), 2, 8, 0) == doctest::Approx(1.0));
  // r = 2, lambda = (2,2): the reflected V block reaches 4
  CHECK(stiefel_lower_bound(lam2(2.0, 2.0), 2, 8, 0) >= 4.0 - 1e-6);
  CHECK_THROWS_AS(stiefel_lower_bound(lam2(1.0, 1.0), 1, 8, 0), SpecError);
  // r = 3 spectra under the crude threshold stay at comass one
  suite::Rng rng(97);
  for (int t = 0; t < 5; ++t) {
    Eigen::VectorXd lam(3);
    for (int i = 0; i < 3; ++i) lam[i] = rng.uniform(0.05, 0.5);
    std::sort(lam.data(), lam.data() + 3, std::greater<double>());
    if (lam[0] * lam[1] > 0.25) lam *= std::sqrt(0.25 / (lam[0] * lam[1]));
    CHECK(stiefel_lower_bound(lam, 3, 16, t) <= 1.0 + 1e-6);
  }
}

TEST_CASE("dilation check") {
  auto c = dilation_check(lam2(0.3, 0.3), 2, 1.0);
  CHECK(c.max_pair_product == doctest::Approx(0.09));
  CHECK(c.crude_threshold == doctest::Approx(1.0));
  CHECK(c.crude_ok);
  CHECK(c.refined_ok);

  Eigen::VectorXd l3(3);
  l3 << 1.0, 1.0, 1.0;
  c = dilation_check(l3, 3, 0.5);
  CHECK_FALSE(c.crude_ok);  // 1 > 1/4
  CHECK(c.crude_threshold == doctest::Approx(0.25));

  l3 << 0.2, 0.2, 0.2;
  c = dilation_check(l3, 3, 0.5);
  CHECK(c.crude_ok);  // 0.04 <= 0.25

  // rank <= 1 certifies unconditionally
  c = dilation_check(lam2(9.0, 0.0), 1, 0.0);
  CHECK(c.crude_ok);
  CHECK(c.refined_ok);
}

TEST_CASE("epsilon_star closed form at rank two") {
  const double e2 = epsilon_star(2, 1e-10);
  CHECK(e2 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(epsilon_star(1, 1e-10), SpecError);
  CHECK_THROWS_AS(epsilon_star(3, 0.0), SpecError);
}

TEST_CASE("epsilon_star(3) against a brute-force scan") {
  const double e3 = epsilon_star(3, 1e-10);
  CHECK(e3 > 0.0);
  CHECK(e3 <= 1.0 + 1e-9);
  const double tau = std::sqrt(e3 / 2.0);
  double brute = 0.0;
  const int N = 1000000;
  for (int i = 0; i <= N; ++i) {
    const double th = (std::numbers::pi / 2.0) * i / N;
    brute = std::max(brute, f_theta_tau(th, tau, 3));
  }
  CHECK(brute <= 1.0 + 1e-9);
  // slightly above epsilon_star the bound must fail
  const double tau_hi = std::sqrt(1.05 * e3 / 2.0);
  double brute_hi = 0.0;
  for (int i = 0; i <= 20000; ++i) {
    const double th = (std::numbers::pi / 2.0) * i / 20000;
    brute_hi = std::max(brute_hi, f_theta_tau(th, tau_hi, 3));
  }
  CHECK(brute_hi > 1.0);
}

TEST_CASE("crude sum identity is exactly one") {
  for (int r = 2; r <= 12; ++r) CHECK(crude_sum_identity(r) == Rational::of(1));
  // spot values from direct rational arithmetic
  CHECK(crude_sum_identity(3).to_string() == "1");
}

TEST_CASE("refined binomial identity") {
  // r = 2, l = 2: both sides -2
  auto [lhs, rhs] = refined_binomial_identity(2, 2);
  CHECK(lhs == Rational::of(-2));
  CHECK(rhs == Rational::of(-2));
  // r = 2, l = 0: both sides 1
  std::tie(lhs, rhs) = refined_binomial_identity(2, 0);
  CHECK(lhs == Rational::of(1));
  CHECK(rhs == Rational::of(1));
  // r = 5, l = 7 and the full table
  for (int r = 2; r <= 10; ++r)
    for (int ell = 0; ell <= 2 * r; ++ell) {
      std::tie(lhs, rhs) = refined_binomial_identity(r, ell);
      CHECK(lhs == rhs);
    }
}

TEST_CASE("restart workers do not change the estimate") {
  Eigen::VectorXd lam(2);
  lam << 1.3, 0.7;
  const ThetaForm th = theta_model(lam, 2, 3);
  const ComassEstimate serial = lower_bound(th, 12, 5, 1);
  const ComassEstimate wide = lower_bound(th, 12, 5, 4);
  CHECK(serial.lower == wide.lower);
  CHECK((serial.witness.columns - wide.witness.columns).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("bracketing holds on random spectra") {
  suite::Rng rng(13);
  for (int t = 0; t < 25; ++t) {
    const int n = rng.uniform_int(1, 4), m = rng.uniform_int(1, 4);
    const int k = std::min(n, m);
    Eigen::VectorXd lam(k);
    for (int i = 0; i < k; ++i) lam[i] = rng.uniform(0.0, 2.0);
    std::sort(lam.data(), lam.data() + k, std::greater<double>());
    int r = 0;
    for (int i = 0; i < k; ++i)
      if (lam[i] > 1e-12) ++r;
    const ComassEstimate est = estimate_comass(theta_model(lam, n, m), lam, r, 6, 1000 + t);
    CHECK(est.lower <= est.upper + 1e-7);
  }
}
