#include "calibra/comass.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

#include "calibra/multi_index.hpp"

namespace calibra {

namespace {

constexpr int kThetaGridPoints = 2048;
constexpr double kGoldenTol = 1e-12;
constexpr double kAscentStepTol = 1e-12;
constexpr int kAscentMaxIter = 500;

double golden_max(const std::function<double(double)>& f, double a, double b,
                  double* arg_out) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > kGoldenTol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double mid = 0.5 * (a + b);
  const double fm = f(mid);
  if (arg_out) *arg_out = mid;
  return fm;
}

// Grid scan refined by golden section around every grid-local maximum.
// Near-tied separated peaks (interior tangency vs the theta = 0 boundary)
// must each be resolved to full precision, or the epsilon bisection accepts
// too much.
UpperBound maximize_over_angle(const std::function<double(double)>& f) {
  const double hi = std::numbers::pi / 2.0;
  std::array<double, kThetaGridPoints> vals{};
  for (int i = 0; i < kThetaGridPoints; ++i)
    vals[static_cast<std::size_t>(i)] = f(hi * i / (kThetaGridPoints - 1));

  UpperBound ub;
  ub.value = -std::numeric_limits<double>::infinity();
  auto consider = [&](double v, double th) {
    if (v > ub.value) {
      ub.value = v;
      ub.theta_star = th;
    }
  };
  for (int i = 0; i < kThetaGridPoints; ++i) {
    const double v = vals[static_cast<std::size_t>(i)];
    const bool left_ok = (i == 0) || v >= vals[static_cast<std::size_t>(i - 1)];
    const bool right_ok =
        (i == kThetaGridPoints - 1) || v >= vals[static_cast<std::size_t>(i + 1)];
    if (!(left_ok && right_ok)) continue;
    consider(v, hi * i / (kThetaGridPoints - 1));
    const double a = hi * std::max(0, i - 1) / (kThetaGridPoints - 1);
    const double b = hi * std::min(kThetaGridPoints - 1, i + 1) / (kThetaGridPoints - 1);
    double garg = 0.0;
    const double gv = golden_max(f, a, b, &garg);
    consider(gv, garg);
  }
  return ub;
}

// f with per-degree weights w[l] in place of tau^l Lambda_l, l = 2..r
double angle_series(double theta, const Eigen::VectorXd& w, int r) {
  const double c = std::cos(theta), s = std::sin(theta);
  double value = std::pow(c, r);
  for (int l = 2; l <= r; ++l)
    value += w[l] * (l - 1) * static_cast<double>(binomial(r, l)) *
             std::pow(c, r - l) * std::pow(s, l);
  return value;
}

// deterministic standard normals (Box-Muller over the raw generator bits)
struct NormalGen {
  explicit NormalGen(std::uint64_t seed) : rng(seed) {}
  double uniform01() {  // in (0, 1)
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
  }
  double next() {
    if (has_spare) {
      has_spare = false;
      return spare;
    }
    const double u1 = uniform01(), u2 = uniform01();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    spare = rad * std::sin(ang);
    has_spare = true;
    return rad * std::cos(ang);
  }
  std::mt19937_64 rng;
  bool has_spare = false;
  double spare = 0.0;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t k) {
  return seed ^ (0x9E3779B97F4A7C15ull * (k + 1));
}

// thin QR with the R diagonal forced positive
Eigen::MatrixXd retract(const Eigen::MatrixXd& A) {
  const int d = static_cast<int>(A.rows());
  const int k = static_cast<int>(A.cols());
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(d, k);
  const Eigen::MatrixXd R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  for (int j = 0; j < k; ++j)
    if (R(j, j) < 0.0) Q.col(j) *= -1.0;
  return Q;
}

struct AscentResult {
  double value = 0.0;
  Eigen::MatrixXd frame;
};

AscentResult ascend(const NFormD& form, Eigen::MatrixXd A) {
  Eigen::MatrixXd grad;
  double val = evaluate_with_gradient(form, A, grad);
  double t = 1.0;
  for (int iter = 0; iter < kAscentMaxIter; ++iter) {
    const Eigen::MatrixXd sym =
        0.5 * (A.transpose() * grad + grad.transpose() * A);
    const Eigen::MatrixXd xi = grad - A * sym;
    const double xin = xi.norm();
    if (xin * t < kAscentStepTol) break;
    bool accepted = false;
    while (t * xin >= kAscentStepTol) {
      const Eigen::MatrixXd cand = retract(A + t * xi);
      const double cv = evaluate(form, cand);
      if (cv > val) {
        A = cand;
        val = evaluate_with_gradient(form, A, grad);
        t = std::min(t * 1.6180339887, 1e6);
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }
  return AscentResult{val, std::move(A)};
}

}  // namespace

double f_theta_tau(double theta, double tau, int r) {
  if (r < 2) throw SpecError("f_theta_tau: rank must be at least 2");
  CALIBRA_REQUIRE(tau >= 0.0, "f_theta_tau: tau must be nonnegative");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(r + 1);
  double p = tau;
  for (int l = 2; l <= r; ++l) {
    p *= tau;
    w[l] = p;  // tau^l
  }
  return angle_series(theta, w, r);
}

UpperBound maximize_f_tau(double tau, int r) {
  if (r < 2) throw SpecError("maximize_f_tau: rank must be at least 2");
  return maximize_over_angle([&](double th) { return f_theta_tau(th, tau, r); });
}

UpperBound upper_bound(const Eigen::VectorXd& lambda_sorted, int r) {
  if (r < 2) return UpperBound{1.0, 0.0};
  Eigen::VectorXd lam = lambda_sorted;
  std::sort(lam.data(), lam.data() + lam.size(), std::greater<double>());
  CALIBRA_REQUIRE(lam.size() == 0 || lam[lam.size() - 1] >= 0.0,
                  "upper_bound: singular values must be nonnegative");

  Eigen::VectorXd w = Eigen::VectorXd::Zero(r + 1);
  double prod = (lam.size() > 0) ? lam[0] : 0.0;
  for (int l = 2; l <= r; ++l) {
    prod *= (l - 1 < lam.size()) ? lam[l - 1] : 0.0;
    w[l] = prod;  // Lambda_l, the largest product of l values
  }
  return maximize_over_angle([&](double th) { return angle_series(th, w, r); });
}

ComassEstimate lower_bound(const ThetaForm& theta, int restarts, std::uint64_t seed,
                           int threads) {
  CALIBRA_REQUIRE(restarts >= 1, "lower_bound: need at least one restart");
  const NFormD& form = theta.form;
  const int d = form.ambient_dim();
  const int k = form.degree();
  CALIBRA_REQUIRE(k >= 1 && k <= d, "lower_bound: degenerate form degree");

  // every ascent start, in a fixed order: both orientations of every
  // coordinate k-plane, then the seeded random frames
  const std::int64_t planes = binomial(d, k);
  const std::int64_t total = 2 * planes + restarts;
  auto start_frame = [&](std::int64_t s) {
    if (s < 2 * planes) {
      std::array<int, kBinomialMax> idx{};
      unrank_multi_index(s / 2, k, std::span<int>(idx.data(), static_cast<std::size_t>(k)));
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, k);
      for (int t = 0; t < k; ++t) A(idx[static_cast<std::size_t>(t)], t) = 1.0;
      if (s % 2 == 1) A.col(k - 1) *= -1.0;
      return A;
    }
    NormalGen gen(mix_seed(seed, static_cast<std::uint64_t>(s - 2 * planes)));
    Eigen::MatrixXd A(d, k);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < k; ++j) A(i, j) = gen.next();
    return retract(A);
  };

  std::vector<AscentResult> results(static_cast<std::size_t>(total));
  auto run_range = [&](std::int64_t first, std::int64_t stride) {
    for (std::int64_t s = first; s < total; s += stride)
      results[static_cast<std::size_t>(s)] = ascend(form, start_frame(s));
  };
  if (threads <= 1) {
    run_range(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(run_range, t, threads);
    for (auto& th : pool) th.join();
  }

  ComassEstimate est;
  est.lower = -std::numeric_limits<double>::infinity();
  est.restarts_used = restarts;
  est.seed = seed;
  est.upper = std::numeric_limits<double>::quiet_NaN();
  est.theta_star = std::numeric_limits<double>::quiet_NaN();
  // reduce in start order; earlier starts win ties so fp-level improvements
  // never displace the witness, and the result is scheduling-independent
  for (const auto& r2 : results) {
    const double margin = std::isfinite(est.lower)
                              ? 1e-12 * std::max(1.0, std::abs(est.lower))
                              : 0.0;
    if (r2.value > est.lower + margin) {
      est.lower = r2.value;
      est.witness.columns = r2.frame;
    }
  }
  return est;
}

double stiefel_lower_bound(const Eigen::VectorXd& lambda, int r, int restarts,
                           std::uint64_t seed) {
  if (r < 2) throw SpecError("stiefel_lower_bound: rank must be at least 2");
  Eigen::VectorXd lam = lambda;
  std::sort(lam.data(), lam.data() + lam.size(), std::greater<double>());
  Eigen::VectorXd lam_r = Eigen::VectorXd::Zero(r);
  lam_r.head(std::min<int>(r, static_cast<int>(lam.size()))) =
      lam.head(std::min<int>(r, static_cast<int>(lam.size())));

  // model coframes on R^{2r}: tangent covector j = dx_j, normal = dy_j
  Eigen::MatrixXd tangent_cov = Eigen::MatrixXd::Zero(2 * r, r);
  Eigen::MatrixXd normal_cov = Eigen::MatrixXd::Zero(2 * r, r);
  for (int j = 0; j < r; ++j) {
    tangent_cov(j, j) = 1.0;
    normal_cov(r + j, j) = 1.0;
  }
  const NFormD model = theta_series_from_coframes(tangent_cov, normal_cov, lam_r, r);

  ThetaForm th{model, Eigen::VectorXd(), ThetaRoute::svd_series};
  return lower_bound(th, restarts, seed).lower;
}

DilationCheck dilation_check(const Eigen::VectorXd& lambda_sorted, int r, double epsilon) {
  DilationCheck c;
  c.rank_r = r;
  c.lambda = lambda_sorted;
  std::sort(c.lambda.data(), c.lambda.data() + c.lambda.size(), std::greater<double>());
  c.max_pair_product =
      (c.lambda.size() >= 2) ? c.lambda[0] * c.lambda[1] : 0.0;
  if (r <= 1) {
    c.crude_threshold = std::numeric_limits<double>::infinity();
    c.refined_threshold = std::numeric_limits<double>::infinity();
    c.crude_ok = true;
    c.refined_ok = true;
    return c;
  }
  c.crude_threshold = 1.0 / static_cast<double>((r - 1) * (r - 1));
  c.refined_threshold = epsilon / static_cast<double>(r - 1);
  constexpr double slack = 1e-12;
  c.crude_ok = c.max_pair_product <= c.crude_threshold + slack;
  c.refined_ok = c.max_pair_product <= c.refined_threshold + slack;
  return c;
}

double epsilon_star(int r, double tol) {
  if (r < 2) throw SpecError("epsilon_star: rank must be at least 2");
  if (!(tol > 0.0)) throw SpecError("epsilon_star: tol must be positive");
  constexpr double slack = 1e-12;
  auto passes = [&](double eps) {
    return maximize_f_tau(std::sqrt(eps / (r - 1)), r).value <= 1.0 + slack;
  };
  double lo = 0.0, hi = 1.0;
  while (passes(hi)) {
    lo = hi;
    hi *= 2.0;
    CALIBRA_REQUIRE(hi < 1e6, "epsilon_star: no failing bracket found");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (passes(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

Rational crude_sum_identity(int r) {
  CALIBRA_REQUIRE(r >= 2, "crude_sum_identity: rank must be at least 2");
  Rational sum = Rational::of(0);
  std::int64_t pow = 1;
  for (int l = 2; l <= r; ++l) {
    // accumulate (l-1) C(r,l) / (r-1)^l
    pow = 1;
    for (int i = 0; i < l; ++i) pow *= (r - 1);
    sum = sum + Rational::of((l - 1) * binomial(r, l), pow);
  }
  return sum;
}

std::pair<Rational, Rational> refined_binomial_identity(int r, int ell) {
  CALIBRA_REQUIRE(r >= 2 && ell >= 0 && ell <= 2 * r,
                  "refined_binomial_identity: need r >= 2, 0 <= ell <= 2r");
  const std::int64_t rm1 = r - 1;
  const Rational lhs = Rational::of(rm1 * rm1 * binomial(2 * r - 2, ell - 2) -
                                    2 * rm1 * binomial(2 * r - 2, ell - 1) +
                                    binomial(2 * r - 2, ell));
  const Rational rhs = Rational::of((ell - 1) * binomial(2 * r, ell)) *
                       Rational::of(static_cast<std::int64_t>(ell) * r - 2 * (2 * r - 1),
                                    2 * (2 * r - 1));
  return {lhs, rhs};
}

ComassEstimate estimate_comass(const ThetaForm& theta, const Eigen::VectorXd& lambda_sorted,
                               int r, int restarts, std::uint64_t seed) {
  ComassEstimate est = lower_bound(theta, restarts, seed);
  const UpperBound ub = upper_bound(lambda_sorted, r);
  est.upper = ub.value;
  est.theta_star = ub.theta_star;
  return est;
}

}  // namespace calibra
