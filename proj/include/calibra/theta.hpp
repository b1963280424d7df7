#pragma once

#include <Eigen/Dense>

#include "calibra/exterior.hpp"
#include "calibra/frames.hpp"

namespace calibra {

enum class ThetaRoute { svd_series, h_formula, g_formula, codim2, svd_coords };

const char* to_string(ThetaRoute r);

/// The candidate calibrating n-form of a graph at a point, as a concrete
/// alternating form on R^{n+m} in standard coordinates.
///
/// All construction routes return the same form, in the orientation fixed
/// by the standard orientation of the base R^n ("graphical" orientation):
/// routes that go through an SVD frame multiply by the sign of
/// det(u_basis), since the domain singular basis is free to reverse
/// orientation. The canonical route for downstream consumers is
/// theta_h: it needs no frame choice and is smooth in dF, whereas frame
/// routes are discontinuous at singular-value ties and exist as
/// cross-checks.
struct ThetaForm {
  NFormD form{};
  Eigen::VectorXd base_point{};
  ThetaRoute route = ThetaRoute::h_formula;
};

/// The ell-fold contraction iterate applied to the graph volume form,
/// expressed in standard coordinates through the frame:
/// ell! * sum_{|I|=ell} (prod_{j in I} lambda_j) Delta_I. Index sets are
/// restricted to {1..rank_r}; the result is zero for ell > rank_r. Returned
/// in the frame orientation (no det(u) correction).
NFormD psi_ell(const SvdFrame& fr, int ell);

/// The alternating series vol - sum_{ell>=2} (-1)^ell (ell-1)
/// sum_{|I|=ell} (prod lambda) Delta_I over arbitrary tangent/normal
/// coframes given by covector components (columns). Shared by the SVD
/// route and the reduced comass model.
NFormD theta_series_from_coframes(const Eigen::MatrixXd& tangent_covectors,
                                  const Eigen::MatrixXd& normal_covectors,
                                  const Eigen::VectorXd& lambda, int rank);

/// Theta from the SVD-frame series.
ThetaForm theta_svd(const SvdFrame& fr);

/// Theta from the normal-metric coordinate expression
///   sqrt(h) (tr h^{-1} - (m-1)) (*1) + sum_{a,b} dy_a ^ sqrt(h) h^{ab} (*df_b),
/// with h = I + dF dF^T and * the Hodge star on the R^n factor. No SVD is
/// performed.
ThetaForm theta_h(const Eigen::Ref<const Eigen::MatrixXd>& dF);

/// Theta from the induced-metric expression
///   sqrt(g) (tr g^{-1} - (n-1)) (*1) + sum_a dy_a ^ [X_a  _| (*1)],
/// with g = I + dF^T dF and X_a^j = sqrt(g) g^{jk} d_k f_a.
ThetaForm theta_g(const Eigen::Ref<const Eigen::MatrixXd>& dF);

/// Codimension-two closed form in terms of the two gradients.
ThetaForm theta_codim2(const Eigen::Ref<const Eigen::VectorXd>& grad_f,
                       const Eigen::Ref<const Eigen::VectorXd>& grad_g);

/// Theta from the SVD-coordinate expression
///   sqrt(prod(1+l_i^2)) [ (1 - sum l_j^2/(1+l_j^2)) dx-block
///     + sum_k (-1)^{k-1} l_k/(1+l_k^2) dy_k ^ (dx-block omitting k) ],
/// built in the primed coordinates and rotated back through u_basis and
/// v_basis.
ThetaForm theta_svd_coords(const SvdFrame& fr);

/// Theta of the m x n diagonal differential diag(lambda) via the canonical
/// route; convenience for comass work on prescribed singular values.
ThetaForm theta_model(const Eigen::VectorXd& lambda, int n, int m);

}  // namespace calibra
