#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "calibra/comass.hpp"
#include "calibra/maps.hpp"

namespace calibra {

enum class Verdict {
  calibrated_crude,
  calibrated_refined,
  comass_bound_only,
  not_certified,
  not_minimal,
};

const char* to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

/// Per-grid-point certification record. Two verdict columns: pointwise uses
/// the numerical rank at the point, global re-evaluates the dilation
/// thresholds against the grid-wide maximum rank, which is the quantity the
/// sup-rank hypotheses actually constrain.
struct PointReport {
  Eigen::VectorXd point;
  int rank_r = 0;
  Eigen::VectorXd lambdas;
  double max_pair_product = 0.0;
  double mgs_norm = 0.0;
  double dtheta_norm = 0.0;
  double upper = 0.0;
  double lower = 0.0;
  bool lower_computed = false;
  Verdict pointwise_verdict = Verdict::not_certified;
  Verdict global_verdict = Verdict::not_certified;
  /// Nonempty when the point could not be evaluated (builtin singularity,
  /// no stencil margin); numeric fields are NaN then and the verdicts stay
  /// not_certified. A bad point never aborts the sweep.
  std::string error;
};

/// Uniform per-axis grid: count points from lo to hi inclusive (a single
/// point sits at lo).
struct GridSpec {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  std::vector<int> count;

  std::int64_t total() const;
  /// Grid point by flat index; the last axis varies fastest.
  Eigen::VectorXd point(std::int64_t flat) const;
};

struct CertifyOptions {
  double minimality_tol = 1e-6;
  double comass_tol = 1e-9;
  double epsilon_tol = 1e-10;
  bool compute_lower = false;
  int restarts = 64;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct RegionReport {
  GridSpec grid;
  CertifyOptions options;
  int global_rank = 0;
  int lambda_count = 0;  // number of lambda columns, min(n, m)
  /// epsilon used per rank (from epsilon_star, cached)
  std::map<int, double> epsilon_by_rank;
  std::vector<PointReport> points;
  std::map<std::string, std::int64_t> pointwise_counts;
  std::map<std::string, std::int64_t> global_counts;
};

/// Sweep the grid: per point Jacobian, singular values, minimal-graph
/// residual, dilation flags, analytic comass bound and (optionally) the
/// optimizer lower bound; verdicts per the decision table. Points are
/// processed independently and gathered in grid order, so the report does
/// not depend on the worker count.
RegionReport certify_grid(const GraphMap& F, const GridSpec& grid, const CertifyOptions& opts);

enum class ReportFormat { csv, json };

std::string emit_csv(const RegionReport& rep);
std::string emit_json(const RegionReport& rep);
RegionReport parse_report_json(const std::string& text);

/// Write to path in the requested format. Throws DomainError on an
/// unwritable path.
void emit_report(const RegionReport& rep, const std::string& path, ReportFormat format);

}  // namespace calibra
