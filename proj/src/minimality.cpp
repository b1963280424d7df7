#include "calibra/minimality.hpp"

#include <cassert>
#include <cmath>

#include "calibra/theta.hpp"

namespace calibra {

namespace {

void require_margin(const GraphMap& F, const Eigen::VectorXd& x, double h) {
  for (int j = 0; j < F.n; ++j) {
    if (x[j] - h < F.domain_lo[j] - 1e-12 || x[j] + h > F.domain_hi[j] + 1e-12)
      throw DomainError("insufficient interior margin for the difference stencil");
  }
}

}  // namespace

Eigen::VectorXd mgs_residual(const GraphMap& F, const Eigen::VectorXd& x) {
  if (!F.contains(x)) throw DomainError("mgs_residual: point outside the domain box");
  if (!F.is_polynomial_backed()) {
    // builtin stencils reach out to ~h2 + h1
    require_margin(F, x, 1.01e-4 * std::max(1.0, x.norm()));
  }

  const Eigen::MatrixXd J = jacobian(F, x).entries;  // m x n
  const auto H = hessians(F, x);                     // n x n per component
  const int n = F.n, m = F.m;

  const Eigen::MatrixXd g = Eigen::MatrixXd::Identity(n, n) + J.transpose() * J;
  const Eigen::MatrixXd ginv = g.inverse();
  const double sqrtg = std::sqrt(g.determinant());
  const Eigen::MatrixXd P = sqrtg * ginv;

  Eigen::VectorXd res = Eigen::VectorXd::Zero(m);
  for (int a = 0; a < m; ++a)
    res[a] = P.cwiseProduct(H[static_cast<std::size_t>(a)]).sum();

  Eigen::MatrixXd dJ(m, n);
  for (int j = 0; j < n; ++j) {
    for (int a = 0; a < m; ++a) dJ.row(a) = H[static_cast<std::size_t>(a)].row(j);
    const Eigen::MatrixXd dg = dJ.transpose() * J + J.transpose() * dJ;
    const double dsqrtg = 0.5 * sqrtg * (ginv * dg).trace();
    const Eigen::MatrixXd dP = dsqrtg * ginv - sqrtg * (ginv * dg * ginv);
    res += J * dP.row(j).transpose();  // sum_k dP(j,k) d_k f_a
  }
  return res;
}

double default_dtheta_step(const Eigen::VectorXd& x) {
  return 1e-4 * std::max(1.0, x.norm());
}

double dtheta_residual(const GraphMap& F, const Eigen::VectorXd& x, double h) {
  if (h <= 0.0) h = default_dtheta_step(x);
  if (!F.contains(x)) throw DomainError("dtheta_residual: point outside the domain box");
  require_margin(F, x, h + (F.is_polynomial_backed() ? 0.0 : 1.01e-6 * std::max(1.0, x.norm())));

  const int n = F.n, m = F.m, d = n + m;
  NFormD dtheta(d, n + 1);
  Eigen::VectorXd xs = x;
  for (int j = 0; j < n; ++j) {
    xs[j] = x[j] + h;
    NFormD plus = theta_h(jacobian(F, xs).entries).form;
    xs[j] = x[j] - h;
    const NFormD minus = theta_h(jacobian(F, xs).entries).form;
    xs[j] = x[j];
    plus -= minus;
    plus *= 1.0 / (2.0 * h);
    const int dxj[1] = {j};
    dtheta += wedge(NFormD::basis(d, dxj), plus);
  }

#ifndef NDEBUG
  // Every surviving component must contain exactly one dy factor: pure-dx
  // components of an (n+1)-form on an n-dimensional x-space vanish, and the
  // form has no two-normal components to differentiate.
  for_each_multi_index(d, n + 1, [&](std::int64_t r, std::span<const int> I) {
    int normals = 0;
    for (int i : I)
      if (i >= n) ++normals;
    if (normals != 1) assert(std::abs(dtheta.coeffs()[r]) == 0.0);
  });
#endif
  return dtheta.coeffs().norm();
}

EquivalenceSummary equivalence_probe(const GraphMap& F,
                                     const std::vector<Eigen::VectorXd>& points) {
  EquivalenceSummary out;
  out.records.reserve(points.size());
  for (const auto& x : points) {
    EquivalenceRecord rec;
    rec.report.point = x;
    rec.report.mgs_residual = mgs_residual(F, x);
    rec.report.mgs_norm = rec.report.mgs_residual.norm();
    rec.report.step = default_dtheta_step(x);
    rec.report.dtheta_norm = dtheta_residual(F, x, rec.report.step);
    if (rec.report.mgs_norm > 1e-6) {
      rec.ratio = rec.report.dtheta_norm / rec.report.mgs_norm;
      rec.ratio_defined = true;
    }
    out.max_mgs_norm = std::max(out.max_mgs_norm, rec.report.mgs_norm);
    out.max_dtheta_norm = std::max(out.max_dtheta_norm, rec.report.dtheta_norm);
    out.records.push_back(std::move(rec));
  }
  return out;
}

}  // namespace calibra
