#include "calibra/theta.hpp"

#include <array>
#include <cmath>

#include "calibra/multi_index.hpp"

namespace calibra {

const char* to_string(ThetaRoute r) {
  switch (r) {
    case ThetaRoute::svd_series: return "svd_series";
    case ThetaRoute::h_formula: return "h_formula";
    case ThetaRoute::g_formula: return "g_formula";
    case ThetaRoute::codim2: return "codim2";
    case ThetaRoute::svd_coords: return "svd_coords";
  }
  return "?";
}

namespace {

NFormD covector_padded(int d, const Eigen::VectorXd& head, int offset) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(d);
  c.segment(offset, head.size()) = head;
  return NFormD::covector(d, c);
}

// Delta_I over given coframes: the j-th wedge factor is the tangent
// covector j for j outside I and the normal covector j for j in I.
NFormD delta_form(const Eigen::MatrixXd& tangent_cov, const Eigen::MatrixXd& normal_cov,
                  std::span<const int> I) {
  const int d = static_cast<int>(tangent_cov.rows());
  const int n = static_cast<int>(tangent_cov.cols());
  NFormD acc = NFormD::constant(d, 1.0);
  std::size_t t = 0;
  for (int j = 0; j < n; ++j) {
    const bool in_I = (t < I.size() && I[t] == j);
    if (in_I) ++t;
    acc = wedge(acc, NFormD::covector(d, in_I ? normal_cov.col(j) : tangent_cov.col(j)));
  }
  return acc;
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

NFormD psi_ell(const SvdFrame& fr, int ell) {
  CALIBRA_REQUIRE(ell >= 0 && ell <= fr.n, "psi_ell: ell out of range");
  const int d = fr.n + fr.m;
  NFormD out(d, fr.n);
  if (ell > fr.rank_r) return out;

  for_each_multi_index(fr.rank_r, ell, [&](std::int64_t, std::span<const int> I) {
    double coef = 1.0;
    for (int j : I) coef *= fr.lambdas[j];
    out += coef * delta_form(fr.tangent_frame, fr.normal_frame, I);
  });
  return factorial(ell) * out;
}

NFormD theta_series_from_coframes(const Eigen::MatrixXd& tangent_covectors,
                                  const Eigen::MatrixXd& normal_covectors,
                                  const Eigen::VectorXd& lambda, int rank) {
  NFormD th = delta_form(tangent_covectors, normal_covectors, {});
  for (int ell = 2; ell <= rank; ++ell) {
    const double series_coef = ((ell % 2 == 0) ? -1.0 : 1.0) * (ell - 1);
    for_each_multi_index(rank, ell, [&](std::int64_t, std::span<const int> I) {
      double coef = series_coef;
      for (int j : I) coef *= lambda[j];
      th += coef * delta_form(tangent_covectors, normal_covectors, I);
    });
  }
  return th;
}

ThetaForm theta_svd(const SvdFrame& fr) {
  NFormD th = theta_series_from_coframes(fr.tangent_frame, fr.normal_frame,
                                         fr.lambdas_padded(), fr.rank_r);
  th *= fr.domain_orientation();
  return ThetaForm{std::move(th), Eigen::VectorXd(), ThetaRoute::svd_series};
}

ThetaForm theta_h(const Eigen::Ref<const Eigen::MatrixXd>& dF) {
  const int m = static_cast<int>(dF.rows());
  const int n = static_cast<int>(dF.cols());
  const int d = n + m;

  const Eigen::MatrixXd h = Eigen::MatrixXd::Identity(m, m) + dF * dF.transpose();
  const Eigen::MatrixXd hinv = h.inverse();
  const double sqrth = std::sqrt(h.determinant());

  std::array<int, kBinomialMax> xs{};
  for (int j = 0; j < n; ++j) xs[static_cast<std::size_t>(j)] = j;
  const NFormD vol = NFormD::basis(d, std::span<const int>(xs.data(), static_cast<std::size_t>(n)));

  NFormD th = (sqrth * (hinv.trace() - (m - 1))) * vol;

  std::vector<NFormD> star_df;
  star_df.reserve(static_cast<std::size_t>(m));
  for (int b = 0; b < m; ++b)
    star_df.push_back(hodge_star_rn(covector_padded(d, dF.row(b).transpose(), 0), n));

  for (int a = 0; a < m; ++a) {
    NFormD acc(d, n - 1);
    for (int b = 0; b < m; ++b) acc += (sqrth * hinv(a, b)) * star_df[static_cast<std::size_t>(b)];
    const int ya[1] = {n + a};
    th += wedge(NFormD::basis(d, ya), acc);
  }
  return ThetaForm{std::move(th), Eigen::VectorXd(), ThetaRoute::h_formula};
}

ThetaForm theta_g(const Eigen::Ref<const Eigen::MatrixXd>& dF) {
  const int m = static_cast<int>(dF.rows());
  const int n = static_cast<int>(dF.cols());
  const int d = n + m;

  const Eigen::MatrixXd g = Eigen::MatrixXd::Identity(n, n) + dF.transpose() * dF;
  const Eigen::MatrixXd ginv = g.inverse();
  const double sqrtg = std::sqrt(g.determinant());

  std::array<int, kBinomialMax> xs{};
  for (int j = 0; j < n; ++j) xs[static_cast<std::size_t>(j)] = j;
  const NFormD vol = NFormD::basis(d, std::span<const int>(xs.data(), static_cast<std::size_t>(n)));

  NFormD th = (sqrtg * (ginv.trace() - (n - 1))) * vol;
  for (int a = 0; a < m; ++a) {
    Eigen::VectorXd X = Eigen::VectorXd::Zero(d);
    X.head(n) = sqrtg * (ginv * dF.row(a).transpose());
    const int ya[1] = {n + a};
    th += wedge(NFormD::basis(d, ya), interior_product(X, vol));
  }
  return ThetaForm{std::move(th), Eigen::VectorXd(), ThetaRoute::g_formula};
}

ThetaForm theta_codim2(const Eigen::Ref<const Eigen::VectorXd>& grad_f,
                       const Eigen::Ref<const Eigen::VectorXd>& grad_g) {
  CALIBRA_REQUIRE(grad_f.size() == grad_g.size(), "theta_codim2: gradient size mismatch");
  const int n = static_cast<int>(grad_f.size());
  const int d = n + 2;

  const double f2 = grad_f.squaredNorm();
  const double g2 = grad_g.squaredNorm();
  const double fg = grad_f.dot(grad_g);
  const double xi = (1.0 + f2) * (1.0 + g2) - fg * fg;

  std::array<int, kBinomialMax> xs{};
  for (int j = 0; j < n; ++j) xs[static_cast<std::size_t>(j)] = j;
  const NFormD vol = NFormD::basis(d, std::span<const int>(xs.data(), static_cast<std::size_t>(n)));

  const NFormD sdf = hodge_star_rn(covector_padded(d, grad_f, 0), n);
  const NFormD sdg = hodge_star_rn(covector_padded(d, grad_g, 0), n);
  const int y1[1] = {n}, y2[1] = {n + 1};

  NFormD th = (1.0 - f2 * g2 + fg * fg) * vol;
  th += wedge(NFormD::basis(d, y1), (1.0 + g2) * sdf - fg * sdg);
  th += wedge(NFormD::basis(d, y2), (1.0 + f2) * sdg - fg * sdf);
  th *= 1.0 / std::sqrt(xi);
  return ThetaForm{std::move(th), Eigen::VectorXd(), ThetaRoute::codim2};
}

ThetaForm theta_svd_coords(const SvdFrame& fr) {
  const int n = fr.n, m = fr.m, d = n + m;
  const Eigen::VectorXd lam = fr.lambdas_padded();

  double prod = 1.0, shrink = 0.0;
  for (int i = 0; i < n; ++i) {
    prod *= 1.0 + lam[i] * lam[i];
    shrink += lam[i] * lam[i] / (1.0 + lam[i] * lam[i]);
  }
  const double pref = std::sqrt(prod);

  // primed coordinate covectors dx'_j, dy'_k in standard coordinates
  std::vector<NFormD> dxp, dyp;
  dxp.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) dxp.push_back(covector_padded(d, fr.u_basis.col(j), 0));
  const int nm = std::min(n, m);
  dyp.reserve(static_cast<std::size_t>(nm));
  for (int k = 0; k < nm; ++k) dyp.push_back(covector_padded(d, fr.v_basis.col(k), n));

  auto xblock_omitting = [&](int omit) {
    NFormD acc = NFormD::constant(d, 1.0);
    for (int j = 0; j < n; ++j)
      if (j != omit) acc = wedge(acc, dxp[static_cast<std::size_t>(j)]);
    return acc;
  };

  NFormD th = (pref * (1.0 - shrink)) * xblock_omitting(-1);
  for (int k = 0; k < nm; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    const double coef = pref * sign * lam[k] / (1.0 + lam[k] * lam[k]);
    if (coef == 0.0) continue;
    th += coef * wedge(dyp[static_cast<std::size_t>(k)], xblock_omitting(k));
  }
  th *= fr.domain_orientation();
  return ThetaForm{std::move(th), Eigen::VectorXd(), ThetaRoute::svd_coords};
}

ThetaForm theta_model(const Eigen::VectorXd& lambda, int n, int m) {
  CALIBRA_REQUIRE(lambda.size() <= std::min(n, m), "theta_model: too many singular values");
  Eigen::MatrixXd dF = Eigen::MatrixXd::Zero(m, n);
  for (int i = 0; i < lambda.size(); ++i) dF(i, i) = lambda[i];
  return theta_h(dF);
}

}  // namespace calibra
