#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "calibra/errors.hpp"

namespace calibra {

/// One polynomial monomial: coef * prod_j x_j^{exps[j]}.
struct PolyTerm {
  Eigen::VectorXi exps;
  double coef = 0.0;
};

/// A smooth map F: Omega subset R^n -> R^m.
///
/// Two kinds: explicit polynomials (exact derivatives to any order used
/// here) and named builtins from the gallery. Builtins that are in fact
/// polynomial (linear, holomorphic_square, paraboloid) carry their exact
/// polynomial expansion and answer derivative queries exactly; genuinely
/// transcendental builtins (scherk) fall back to central finite
/// differences. GraphMap is immutable after construction and all queries
/// are pure.
struct GraphMap {
  enum class Kind { polynomial, builtin };

  int n = 0;
  int m = 0;
  Kind kind = Kind::polynomial;

  /// kind == polynomial, or a polynomial-backed builtin: m component
  /// expansions. Empty for transcendental builtins.
  std::vector<std::vector<PolyTerm>> components;

  std::string builtin_name;
  std::vector<double> params;

  Eigen::VectorXd domain_lo;
  Eigen::VectorXd domain_hi;

  bool is_polynomial_backed() const { return !components.empty(); }

  /// Closed-interval membership with 1e-12 slack per axis.
  bool contains(const Eigen::VectorXd& x) const;

  /// Map value at x. Throws DomainError outside the box or where a
  /// builtin is undefined.
  Eigen::VectorXd value(const Eigen::VectorXd& x) const;
};

/// First differential dF at a base point; entries(alpha, j) = d f_alpha / d x_j.
struct Jacobian {
  Eigen::MatrixXd entries;
  Eigen::VectorXd base_point;
};

/// dF at x: exact for polynomial-backed maps, otherwise central
/// differences with step 1e-6 * max(1, |x|).
Jacobian jacobian(const GraphMap& F, const Eigen::VectorXd& x);

/// Second derivatives, one symmetric n x n matrix per component: exact for
/// polynomial-backed maps, otherwise second-order central stencils with
/// step 1e-4 * max(1, |x|).
std::vector<Eigen::MatrixXd> hessians(const GraphMap& F, const Eigen::VectorXd& x);

/// Build a gallery builtin. Throws SpecError for unknown names or
/// inconsistent dimensions. Passing n = m = 0 selects the entry's natural
/// dimensions.
GraphMap make_builtin(const std::string& name, int n = 0, int m = 0,
                      std::vector<double> params = {});

/// Parse the map-spec JSON document (see README for the schema). Errors
/// carry a field path, e.g. "components[1][0].exps: expected length 2".
GraphMap parse_map_spec(const std::string& json_text);

/// Serialize back to the map-spec schema (round-trips through parse).
std::string map_spec_to_json(const GraphMap& F);

}  // namespace calibra
