#pragma once

#include <Eigen/Dense>

#include "calibra/errors.hpp"

namespace calibra {

/// Pointwise singular-value data of dF, with the adapted orthonormal bases
/// of the tangent and normal space of the graph.
///
/// Conventions: lambdas sorted descending, length min(n, m). u_basis is the
/// n x n matrix of domain singular directions, v_basis the m x m matrix of
/// codomain directions with det(v_basis) = +1; dF u_i = lambda_i v_i.
/// Column i of tangent_frame is e_i = (u_i, lambda_i v_i)/sqrt(1+lambda_i^2),
/// column a of normal_frame is e_{n+a} = (-lambda_a u_a, v_a)/sqrt(1+lambda_a^2),
/// with lambda = 0 past min(n, m) and the missing u/v columns read as zero.
struct SvdFrame {
  int n = 0;
  int m = 0;
  Eigen::VectorXd lambdas;
  int rank_r = 0;
  double rank_tol = 0.0;
  Eigen::MatrixXd u_basis;
  Eigen::MatrixXd v_basis;
  Eigen::MatrixXd tangent_frame;
  Eigen::MatrixXd normal_frame;

  /// sign(det(u_basis)): +1 when the tangent frame carries the graphical
  /// orientation of the base R^n, -1 otherwise.
  double domain_orientation() const;

  /// A positively (graphically) oriented orthonormal basis of the tangent
  /// plane: tangent_frame itself, or tangent_frame with the last column
  /// negated when domain_orientation() is -1.
  Eigen::MatrixXd oriented_tangent_frame() const;

  /// lambdas zero-padded to length n.
  Eigen::VectorXd lambdas_padded() const;
};

/// Full SVD frame of dF (m x n). Deterministic; ties keep the SVD routine's
/// output order. Numerical rank uses rank_tol = 1e-9 * lambda_1 (absolute
/// 1e-12 when lambda_1 = 0).
SvdFrame svd_frame(const Eigen::Ref<const Eigen::MatrixXd>& dF);

/// Pointwise tangent/normal data of a graph: G = I + dF^T dF,
/// H = I + dF dF^T, the induced metric g_jk (equal to G), the normal
/// metric h_ab (equal to H), and the J-map's matrix in the isometric
/// bases (L, L_perp), which equals dF.
struct TangentNormalData {
  Eigen::MatrixXd G;
  Eigen::MatrixXd H;
  Eigen::MatrixXd J;
  Eigen::MatrixXd g_metric;
  Eigen::MatrixXd h_metric;
};

TangentNormalData tangent_normal_data(const Eigen::Ref<const Eigen::MatrixXd>& dF);

/// The (n+m) x (n+m) matrix of the tangent-to-normal map J_p, extended by
/// zero on the normal space, computed from J_p = L_perp o dF o L^{-1}.
Eigen::MatrixXd j_ambient_sym(const Eigen::Ref<const Eigen::MatrixXd>& dF);

/// Same map from the projection expression pi_N o iota_2 o dF o G o pi_1
/// (variant = 0) or pi_N o iota_2 o H o dF o pi_1 (variant = 1), restricted
/// to the tangent plane and extended by zero.
Eigen::MatrixXd j_ambient_nonsym(const Eigen::Ref<const Eigen::MatrixXd>& dF, int variant = 0);

/// Max normalized residual over the four classical determinant/inverse
/// identities for g = I + S^T S and h = I + S S^T:
///   det g = det h,           h^{-1} = I - S g^{-1} S^T,
///   tr h^{-1} - m = tr g^{-1} - n,   h^{-1} S = S g^{-1}.
double sylvester_check(const Eigen::Ref<const Eigen::MatrixXd>& S);

}  // namespace calibra
