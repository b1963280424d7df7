#pragma once

#include <Eigen/Dense>
#include <vector>

#include "calibra/maps.hpp"

namespace calibra {

/// Residuals at one point: the minimal-graph-system divergence and the
/// coefficient norm of the numerically differentiated calibrating form.
struct MinimalityReport {
  Eigen::VectorXd point;
  Eigen::VectorXd mgs_residual;
  double mgs_norm = 0.0;
  double dtheta_norm = 0.0;
  double step = 0.0;
};

/// The minimal graph system left-hand side
///   sum_{j,k} d_j( sqrt(g) g^{jk} d_k f_a ),  a = 1..m,
/// expanded analytically: the derivative of sqrt(g) g^{jk} comes from
/// Jacobi's formula and dG = (ddF)^T dF + dF^T ddF, never from differencing
/// the form itself. Exactly zero (up to rounding) for linear maps.
Eigen::VectorXd mgs_residual(const GraphMap& F, const Eigen::VectorXd& x);

/// Default step for dtheta_residual: 1e-4 * max(1, |x|).
double default_dtheta_step(const Eigen::VectorXd& x);

/// Coefficient norm of d Theta(F) at x: the coefficient functions of the
/// canonical-route form are centrally differenced in the x variables only
/// (the form is constant in y), producing an (n+1)-form whose Euclidean
/// coefficient norm is returned. Pass h <= 0 for the default step.
double dtheta_residual(const GraphMap& F, const Eigen::VectorXd& x, double h = 0.0);

struct EquivalenceRecord {
  MinimalityReport report;
  /// dtheta_norm / mgs_norm, defined only where mgs_norm > 1e-6.
  double ratio = 0.0;
  bool ratio_defined = false;
};

struct EquivalenceSummary {
  std::vector<EquivalenceRecord> records;
  double max_mgs_norm = 0.0;
  double max_dtheta_norm = 0.0;
};

/// Evaluate both residuals over a point list; used by the acceptance tests
/// to exercise the closedness equivalence at residual level.
EquivalenceSummary equivalence_probe(const GraphMap& F,
                                     const std::vector<Eigen::VectorXd>& points);

}  // namespace calibra
