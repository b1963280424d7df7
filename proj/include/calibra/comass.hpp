#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>

#include "calibra/exterior.hpp"
#include "calibra/rational.hpp"
#include "calibra/theta.hpp"

namespace calibra {

/// Analytic comass bound: max over the mixing angle, with the achieving
/// angle in [0, pi/2].
struct UpperBound {
  double value = 1.0;
  double theta_star = 0.0;
};

/// Comass bracketing result. lower is the best form value found by the
/// Stiefel ascent (a certified lower bound, with the witness plane);
/// upper is the analytic bound maximized over the mixing angle.
struct ComassEstimate {
  double lower = 0.0;
  FrameD witness;
  double upper = 0.0;
  double theta_star = 0.0;
  int restarts_used = 0;
  std::uint64_t seed = 0;
};

/// The two-dilation conditions on sorted singular values.
struct DilationCheck {
  int rank_r = 0;
  Eigen::VectorXd lambda;
  double max_pair_product = 0.0;
  double crude_threshold = 0.0;   // 1/(r-1)^2
  double refined_threshold = 0.0; // epsilon/(r-1)
  bool crude_ok = false;
  bool refined_ok = false;
};

/// f(theta, tau) = cos^r + sum_{l=2}^{r} tau^l (l-1) C(r,l) cos^{r-l} sin^l.
/// Throws SpecError for r < 2.
double f_theta_tau(double theta, double tau, int r);

/// max over theta in [0, pi/2] of f(theta, tau, r), via a 2048-point grid
/// refined by golden section to 1e-12.
UpperBound maximize_f_tau(double tau, int r);

/// Analytic comass upper bound from the sorted singular values: replaces
/// tau^l by the largest product of l values. r <= 1 returns (1, 0), the
/// exact comass of the rank-<=1 form.
UpperBound upper_bound(const Eigen::VectorXd& lambda_sorted, int r);

/// Multi-restart projected-gradient ascent of evaluate(theta, .) over
/// orthonormal n-frames in R^{n+m}: both orientations of every axis
/// coordinate plane seed the ascent deterministically, followed by
/// `restarts` seeded random frames. Starts are independent and may run on
/// several workers; per-start seeds derive from (seed, start index) and
/// the reduction is in start order, so the result does not depend on the
/// worker count. Fills the lower/witness part of the estimate.
ComassEstimate lower_bound(const ThetaForm& theta, int restarts, std::uint64_t seed,
                           int threads = 1);

/// Same ascent on the reduced 2r x r problem assembled from the singular
/// values alone. Throws SpecError for r < 2.
double stiefel_lower_bound(const Eigen::VectorXd& lambda, int r, int restarts,
                           std::uint64_t seed);

/// Fill the two-dilation flags. r <= 1 certifies unconditionally (comass
/// is exactly one) with infinite thresholds.
DilationCheck dilation_check(const Eigen::VectorXd& lambda_sorted, int r, double epsilon);

/// Largest epsilon (by bisection to tol) with
/// max_theta f(theta, sqrt(epsilon/(r-1)), r) <= 1. The constant of the
/// refined dilation condition; the literature only asserts existence.
double epsilon_star(int r, double tol);

/// Exact rational value of sum_{l=2}^{r} (l-1) C(r,l) (r-1)^{-l}; equals 1
/// for every r >= 2.
Rational crude_sum_identity(int r);

/// Both sides of the square-expansion binomial identity
///   (r-1)^2 C(2r-2,l-2) - 2(r-1) C(2r-2,l-1) + C(2r-2,l)
///     = (l-1) C(2r,l) ( l r / (2(2r-1)) - 1 )
/// as exact rationals.
std::pair<Rational, Rational> refined_binomial_identity(int r, int ell);

/// Convenience: bracket the comass of theta built over the given sorted
/// singular values (lower via ascent, upper via the analytic bound).
ComassEstimate estimate_comass(const ThetaForm& theta, const Eigen::VectorXd& lambda_sorted,
                               int r, int restarts, std::uint64_t seed);

}  // namespace calibra
