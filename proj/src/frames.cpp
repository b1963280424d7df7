#include "calibra/frames.hpp"

#include <cmath>

namespace calibra {

double SvdFrame::domain_orientation() const {
  return u_basis.determinant() >= 0.0 ? 1.0 : -1.0;
}

Eigen::MatrixXd SvdFrame::oriented_tangent_frame() const {
  Eigen::MatrixXd T = tangent_frame;
  if (domain_orientation() < 0.0) T.col(n - 1) *= -1.0;
  return T;
}

Eigen::VectorXd SvdFrame::lambdas_padded() const {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
  p.head(lambdas.size()) = lambdas;
  return p;
}

SvdFrame svd_frame(const Eigen::Ref<const Eigen::MatrixXd>& dF) {
  const int m = static_cast<int>(dF.rows());
  const int n = static_cast<int>(dF.cols());
  CALIBRA_REQUIRE(n >= 1 && m >= 1, "svd_frame: empty Jacobian");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(dF, Eigen::ComputeFullU | Eigen::ComputeFullV);

  SvdFrame fr;
  fr.n = n;
  fr.m = m;
  fr.lambdas = svd.singularValues();
  fr.u_basis = svd.matrixV();  // domain directions
  fr.v_basis = svd.matrixU();  // codomain directions

  // Enforce det(v_basis) = +1. The last codomain column carries the
  // smallest singular value when it is paired at all; flipping it alone is
  // allowed when it is unpaired (m > n), otherwise the paired u column
  // flips with it, which the O(n) domain freedom permits.
  if (fr.v_basis.determinant() < 0.0) {
    fr.v_basis.col(m - 1) *= -1.0;
    if (m - 1 < n) fr.u_basis.col(m - 1) *= -1.0;
  }

  const double lambda1 = fr.lambdas.size() > 0 ? fr.lambdas[0] : 0.0;
  fr.rank_tol = lambda1 > 0.0 ? 1e-9 * lambda1 : 1e-12;
  fr.rank_r = 0;
  for (int i = 0; i < fr.lambdas.size(); ++i)
    if (fr.lambdas[i] > fr.rank_tol) ++fr.rank_r;

  const int nm = std::min(n, m);
  fr.tangent_frame = Eigen::MatrixXd::Zero(n + m, n);
  for (int i = 0; i < n; ++i) {
    const double li = (i < nm) ? fr.lambdas[i] : 0.0;
    const double s = 1.0 / std::sqrt(1.0 + li * li);
    fr.tangent_frame.col(i).head(n) = s * fr.u_basis.col(i);
    if (i < m) fr.tangent_frame.col(i).tail(m) = (s * li) * fr.v_basis.col(i);
  }
  fr.normal_frame = Eigen::MatrixXd::Zero(n + m, m);
  for (int a = 0; a < m; ++a) {
    const double la = (a < nm) ? fr.lambdas[a] : 0.0;
    const double s = 1.0 / std::sqrt(1.0 + la * la);
    if (a < n) fr.normal_frame.col(a).head(n) = (-s * la) * fr.u_basis.col(a);
    fr.normal_frame.col(a).tail(m) = s * fr.v_basis.col(a);
  }
  return fr;
}

namespace {

Eigen::MatrixXd inverse_sqrt_spd(const Eigen::MatrixXd& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  return es.operatorInverseSqrt();
}

struct Isometries {
  Eigen::MatrixXd L;       // (n+m) x n, isometry R^n -> tangent plane
  Eigen::MatrixXd L_perp;  // (n+m) x m, isometry R^m -> normal plane
};

Isometries graph_isometries(const Eigen::Ref<const Eigen::MatrixXd>& dF) {
  const int m = static_cast<int>(dF.rows());
  const int n = static_cast<int>(dF.cols());
  const Eigen::MatrixXd G =
      Eigen::MatrixXd::Identity(n, n) + dF.transpose() * dF;
  const Eigen::MatrixXd H =
      Eigen::MatrixXd::Identity(m, m) + dF * dF.transpose();
  const Eigen::MatrixXd Gis = inverse_sqrt_spd(G);
  const Eigen::MatrixXd His = inverse_sqrt_spd(H);

  Isometries iso;
  iso.L.resize(n + m, n);
  iso.L.topRows(n) = Gis;
  iso.L.bottomRows(m) = dF * Gis;
  iso.L_perp.resize(n + m, m);
  iso.L_perp.topRows(n) = -dF.transpose() * His;
  iso.L_perp.bottomRows(m) = His;
  return iso;
}

}  // namespace

TangentNormalData tangent_normal_data(const Eigen::Ref<const Eigen::MatrixXd>& dF) {
  const int m = static_cast<int>(dF.rows());
  const int n = static_cast<int>(dF.cols());
  TangentNormalData td;
  td.G = Eigen::MatrixXd::Identity(n, n) + dF.transpose() * dF;
  td.H = Eigen::MatrixXd::Identity(m, m) + dF * dF.transpose();
  td.g_metric = td.G;
  td.h_metric = td.H;
  const auto iso = graph_isometries(dF);
  // matrix of L_perp o dF o L^{-1} in the (L, L_perp) bases
  td.J = iso.L_perp.transpose() * (iso.L_perp * dF * iso.L.transpose()) * iso.L;
  return td;
}

Eigen::MatrixXd j_ambient_sym(const Eigen::Ref<const Eigen::MatrixXd>& dF) {
  const auto iso = graph_isometries(dF);
  // L^T restricted to the tangent plane is L^{-1}; it annihilates normals.
  return iso.L_perp * dF * iso.L.transpose();
}

Eigen::MatrixXd j_ambient_nonsym(const Eigen::Ref<const Eigen::MatrixXd>& dF, int variant) {
  const int m = static_cast<int>(dF.rows());
  const int n = static_cast<int>(dF.cols());
  const auto iso = graph_isometries(dF);
  const Eigen::MatrixXd P_T = iso.L * iso.L.transpose();
  const Eigen::MatrixXd P_N =
      Eigen::MatrixXd::Identity(n + m, n + m) - P_T;

  const Eigen::MatrixXd G = Eigen::MatrixXd::Identity(n, n) + dF.transpose() * dF;
  const Eigen::MatrixXd H = Eigen::MatrixXd::Identity(m, m) + dF * dF.transpose();
  const Eigen::MatrixXd core = (variant == 0) ? Eigen::MatrixXd(dF * G) : Eigen::MatrixXd(H * dF);

  Eigen::MatrixXd lift = Eigen::MatrixXd::Zero(n + m, n + m);
  lift.bottomLeftCorner(m, n) = core;  // iota_2 o core o pi_1
  return P_N * lift * P_T;
}

double sylvester_check(const Eigen::Ref<const Eigen::MatrixXd>& S) {
  const int m = static_cast<int>(S.rows());
  const int n = static_cast<int>(S.cols());
  const Eigen::MatrixXd g = Eigen::MatrixXd::Identity(n, n) + S.transpose() * S;
  const Eigen::MatrixXd h = Eigen::MatrixXd::Identity(m, m) + S * S.transpose();
  const Eigen::MatrixXd ginv = g.inverse();
  const Eigen::MatrixXd hinv = h.inverse();

  const double detg = g.determinant();
  const double deth = h.determinant();
  double err = std::abs(detg - deth) / std::max(1.0, std::abs(detg));

  const double e2 =
      (hinv - (Eigen::MatrixXd::Identity(m, m) - S * ginv * S.transpose())).cwiseAbs().maxCoeff() /
      std::max(1.0, hinv.cwiseAbs().maxCoeff());
  err = std::max(err, e2);

  const double trh = hinv.trace() - m;
  const double trg = ginv.trace() - n;
  err = std::max(err, std::abs(trh - trg) / std::max(1.0, std::abs(trg)));

  const double e4 = (hinv * S - S * ginv).cwiseAbs().maxCoeff() /
                    std::max(1.0, S.cwiseAbs().maxCoeff());
  err = std::max(err, e4);
  return err;
}

}  // namespace calibra
