#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "calibra/exterior.hpp"
#include "calibra/suite.hpp"

using namespace calibra;

namespace {
NFormD dx(int d, int i) {
  const int idx[1] = {i};
  return NFormD::basis(d, idx);
}
}  // namespace

TEST_CASE("multi-index ranking round-trips") {
  for (int d = 0; d <= 10; ++d) {
    for (int k = 0; k <= d; ++k) {
      for_each_multi_index(d, k, [&](std::int64_t r, std::span<const int> I) {
        CHECK(rank_multi_index(I) == r);
      });
    }
  }
  // a couple of pinned ranks
  const int i0[2] = {0, 1};
  const int i1[2] = {0, 2};
  const int i2[2] = {1, 2};
  CHECK(rank_multi_index(i0) == 0);
  CHECK(rank_multi_index(i1) == 1);
  CHECK(rank_multi_index(i2) == 2);
}

TEST_CASE("wedge of basis covectors") {
  const NFormD w = wedge(dx(4, 0), dx(4, 1));
  CHECK(w.degree() == 2);
  CHECK(w.coeff({0, 1}) == doctest::Approx(1.0));
  for_each_multi_index(4, 2, [&](std::int64_t r, std::span<const int> I) {
    if (!(I[0] == 0 && I[1] == 1)) CHECK(w.coeffs()[r] == 0.0);
  });

  // antisymmetry: a ^ a = 0 for any 1-form
  suite::Rng rng(7);
  const NFormD a = suite::random_form(rng, 5, 1, 1.0);
  CHECK(wedge(a, a).coeffs().cwiseAbs().maxCoeff() == doctest::Approx(0.0));

  // (dx1 + dx2) ^ (dx1 - dx2) = -2 dx1^dx2
  const NFormD s = dx(3, 0) + dx(3, 1);
  const NFormD t = dx(3, 0) - dx(3, 1);
  const NFormD st = wedge(s, t);
  CHECK(st.coeff({0, 1}) == doctest::Approx(-2.0));
  CHECK(st.coeff({0, 2}) == doctest::Approx(0.0));
  CHECK(st.coeff({1, 2}) == doctest::Approx(0.0));
}

TEST_CASE("wedge rejects mismatched shapes") {
  CHECK_THROWS_AS(wedge(dx(3, 0), dx(4, 0)), InternalError);
  const NFormD top = wedge(wedge(dx(3, 0), dx(3, 1)), dx(3, 2));
  CHECK_THROWS_AS(wedge(top, dx(3, 0)), InternalError);  // degree overflow
}

TEST_CASE("interior product on basis monomials") {
  const NFormD w = wedge(dx(4, 0), dx(4, 1));
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(4);
  e1[0] = 1.0;
  Eigen::VectorXd e3 = Eigen::VectorXd::Zero(4);
  e3[2] = 1.0;

  const NFormD i1 = interior_product(e1, w);
  CHECK(i1.degree() == 1);
  CHECK(i1.coeff({1}) == doctest::Approx(1.0));
  CHECK(i1.coeff({0}) == doctest::Approx(0.0));

  CHECK(interior_product(e3, w).coeffs().cwiseAbs().maxCoeff() == doctest::Approx(0.0));

  suite::Rng rng(11);
  const NFormD a = suite::random_form(rng, 6, 3, 1.0);
  const Eigen::VectorXd v = suite::random_matrix(rng, 6, 1, -1.0, 1.0);
  CHECK(interior_product(v, interior_product(v, a)).coeffs().cwiseAbs().maxCoeff() ==
        doctest::Approx(0.0));

  CHECK_THROWS_AS(interior_product(e1, NFormD::constant(4, 1.0)), InternalError);
}

TEST_CASE("hodge star on the R^n factor") {
  // *(1) with n = 3 is the volume form
  const NFormD vol3 = hodge_star_rn(NFormD::constant(3, 2.5), 3);
  CHECK(vol3.degree() == 3);
  CHECK(vol3.coeff({0, 1, 2}) == doctest::Approx(2.5));

  // *(dx_k) = (-1)^{k-1} dx_1 ^ ... omit k ... ^ dx_n
  for (int n = 1; n <= 6; ++n) {
    for (int k = 0; k < n; ++k) {
      const NFormD s = hodge_star_rn(dx(n, k), n);
      std::vector<int> comp;
      for (int v = 0; v < n; ++v)
        if (v != k) comp.push_back(v);
      const double expect = (k % 2 == 0) ? 1.0 : -1.0;
      CHECK(s.coeff(std::span<const int>(comp.data(), comp.size())) == doctest::Approx(expect));
    }
  }

  // support outside {1..n} is rejected
  const NFormD bad = dx(5, 4);
  CHECK_THROWS_AS(hodge_star_rn(bad, 3), InternalError);
}

TEST_CASE("evaluate on frames") {
  const NFormD w = wedge(dx(4, 0), dx(4, 1));
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(4, 2);
  F(0, 0) = 1.0;
  F(1, 1) = 1.0;
  CHECK(evaluate(w, F) == doctest::Approx(1.0));
  // orientation flip
  Eigen::MatrixXd Fr = F;
  Fr.col(0).swap(Fr.col(1));
  CHECK(evaluate(w, Fr) == doctest::Approx(-1.0));

  // multilinearity against a random 3x3 reparametrization
  suite::Rng rng(3);
  const NFormD a = suite::random_form(rng, 5, 3, 1.0);
  const Eigen::MatrixXd fr = suite::random_matrix(rng, 5, 3, -1.0, 1.0);
  const Eigen::MatrixXd P = suite::random_matrix(rng, 3, 3, -2.0, 2.0);
  CHECK(evaluate(a, Eigen::MatrixXd(fr * P)) ==
        doctest::Approx(P.determinant() * evaluate(a, fr)).epsilon(1e-10));
}

TEST_CASE("evaluate gradient matches finite differences") {
  suite::Rng rng(19);
  const int d = 5, k = 3;
  const NFormD a = suite::random_form(rng, d, k, 1.0);
  Eigen::MatrixXd F = suite::random_matrix(rng, d, k, -1.0, 1.0);
  Eigen::MatrixXd grad;
  const double v0 = evaluate_with_gradient(a, F, grad);
  CHECK(v0 == doctest::Approx(evaluate(a, F)));
  const double h = 1e-6;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < k; ++j) {
      Eigen::MatrixXd Fp = F, Fm = F;
      Fp(i, j) += h;
      Fm(i, j) -= h;
      const double fd = (evaluate(a, Fp) - evaluate(a, Fm)) / (2.0 * h);
      CHECK(grad(i, j) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("frame gram error") {
  FrameD f;
  f.columns = Eigen::MatrixXd::Identity(4, 2);
  CHECK(f.gram_error() == doctest::Approx(0.0));
  f.columns(0, 0) = 1.1;
  CHECK(f.gram_error() > 0.1);
}

TEST_CASE("forms stay usable with a non-double scalar") {
  using NFormF = NForm<float>;
  const int idx0[1] = {0};
  const int idx1[1] = {1};
  const NFormF w = wedge(NFormF::basis(3, idx0), NFormF::basis(3, idx1));
  Eigen::MatrixXf fr = Eigen::MatrixXf::Zero(3, 2);
  fr(0, 0) = 1.0f;
  fr(1, 1) = 1.0f;
  CHECK(evaluate(w, fr) == doctest::Approx(1.0f));
}
