#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "calibra/maps.hpp"
#include "calibra/suite.hpp"

using namespace calibra;

namespace {
Eigen::VectorXd pt2(double a, double b) {
  Eigen::VectorXd x(2);
  x << a, b;
  return x;
}
}  // namespace

TEST_CASE("linear builtin has its matrix as Jacobian everywhere") {
  const GraphMap F = make_builtin("linear", 2, 2, {1.0, 2.0, -0.5, 0.25});
  Eigen::MatrixXd A(2, 2);
  A << 1.0, 2.0, -0.5, 0.25;
  suite::Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const Eigen::VectorXd x = pt2(rng.uniform(-1, 1), rng.uniform(-1, 1));
    CHECK((jacobian(F, x).entries - A).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    for (const auto& H : hessians(F, x)) CHECK(H.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("holomorphic square map derivatives at (1, 0)") {
  const GraphMap F = make_builtin("holomorphic_square");
  const Eigen::MatrixXd J = jacobian(F, pt2(1.0, 0.0)).entries;
  CHECK(J(0, 0) == doctest::Approx(1.0));
  CHECK(J(0, 1) == doctest::Approx(0.0));
  CHECK(J(1, 0) == doctest::Approx(0.0));
  CHECK(J(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("monomial Hessian") {
  // F = (x1^2, 0): first component Hessian [[2,0],[0,0]]
  const GraphMap F = parse_map_spec(R"({
    "n": 2, "m": 2, "kind": "polynomial",
    "components": [[{"exps": [2, 0], "coef": 1.0}], []]
  })");
  const auto H = hessians(F, pt2(0.3, -0.2));
  CHECK(H[0](0, 0) == doctest::Approx(2.0));
  CHECK(H[0](0, 1) == 0.0);
  CHECK(H[0](1, 1) == 0.0);
  CHECK(H[1].cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("scherk derivatives") {
  const GraphMap F = make_builtin("scherk");
  // critical point of the even/odd structure
  const Eigen::MatrixXd J0 = jacobian(F, pt2(0.0, 0.0)).entries;
  CHECK(std::abs(J0(0, 0)) < 1e-9);
  CHECK(std::abs(J0(0, 1)) < 1e-9);
  // d^2/dx^2 log cos x = -sec^2 x: diag(-1, +1) at the origin
  const auto H = hessians(F, pt2(0.0, 0.0));
  CHECK(H[0](0, 0) == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(H[0](1, 1) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(H[0](0, 1)) < 1e-6);
  // exact first derivatives are -tan x1, tan x2
  const Eigen::MatrixXd J = jacobian(F, pt2(0.4, -0.3)).entries;
  CHECK(J(0, 0) == doctest::Approx(-std::tan(0.4)).epsilon(1e-9));
  CHECK(J(0, 1) == doctest::Approx(std::tan(-0.3)).epsilon(1e-9));

  // undefined outside (-pi/2, pi/2)^2
  CHECK_THROWS_AS(F.value(pt2(1.6, 0.0)), DomainError);
}

TEST_CASE("jacobian of polynomials agrees with finite differences of the map") {
  suite::Rng rng(23);
  for (int t = 0; t < 30; ++t) {
    // random cubic in two variables with |coef| <= 1
    GraphMap F;
    F.kind = GraphMap::Kind::polynomial;
    F.n = 2;
    F.m = 1;
    F.components.resize(1);
    for (int e1 = 0; e1 <= 3; ++e1)
      for (int e2 = 0; e2 + e1 <= 3; ++e2) {
        PolyTerm term;
        term.exps = Eigen::VectorXi(2);
        term.exps << e1, e2;
        term.coef = rng.uniform(-1.0, 1.0);
        F.components[0].push_back(term);
      }
    F.domain_lo = Eigen::VectorXd::Constant(2, -1.0);
    F.domain_hi = Eigen::VectorXd::Constant(2, 1.0);

    const Eigen::VectorXd x = pt2(rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8));
    const Eigen::MatrixXd J = jacobian(F, x).entries;
    const double h = 1e-4;
    for (int j = 0; j < 2; ++j) {
      Eigen::VectorXd xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      const double fd = (F.value(xp)[0] - F.value(xm)[0]) / (2.0 * h);
      CHECK(std::abs(J(0, j) - fd) <= 10.0 * h * h);
    }
  }
}

TEST_CASE("hessians agree with differenced jacobians for builtins") {
  const GraphMap F = make_builtin("scherk");
  const Eigen::VectorXd x = pt2(0.35, 0.15);
  const auto H = hessians(F, x);
  const double h = 3e-4;  // outer step balances inner jacobian noise vs truncation
  for (int j = 0; j < 2; ++j) {
    Eigen::VectorXd xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    const Eigen::MatrixXd dJ =
        (jacobian(F, xp).entries - jacobian(F, xm).entries) / (2.0 * h);
    for (int k = 0; k < 2; ++k) CHECK(std::abs(H[0](j, k) - dJ(0, k)) < 1e-6);
  }
}

TEST_CASE("map spec parsing") {
  const GraphMap sch = parse_map_spec(R"({"n":2,"m":1,"kind":"builtin","name":"scherk"})");
  CHECK(sch.builtin_name == "scherk");
  CHECK(sch.n == 2);
  CHECK(sch.m == 1);
  CHECK(sch.domain_hi[0] == doctest::Approx(1.5707963267948966));

  const GraphMap poly = parse_map_spec(R"({
    "n": 2, "m": 2, "kind": "polynomial",
    "components": [
      [{"exps": [2, 0], "coef": 0.5}, {"exps": [0, 2], "coef": -0.5}],
      [{"exps": [1, 1], "coef": 1.0}]
    ]
  })");
  CHECK(poly.m == 2);
  const Eigen::MatrixXd J = jacobian(poly, pt2(1.0, 0.0)).entries;
  CHECK(J(0, 0) == doctest::Approx(1.0));
  CHECK(J(1, 1) == doctest::Approx(1.0));

  // wrong exponent arity carries the field path
  try {
    parse_map_spec(R"({
      "n": 2, "m": 1, "kind": "polynomial",
      "components": [[{"exps": [1, 0, 0], "coef": 1.0}]]
    })");
    CHECK(false);
  } catch (const SpecError& e) {
    CHECK(std::string(e.what()).find("components[0][0].exps") != std::string::npos);
  }

  CHECK_THROWS_AS(parse_map_spec("{"), SpecError);
  CHECK_THROWS_AS(parse_map_spec(R"({"n":2,"m":1,"kind":"builtin","name":"nope"})"), SpecError);
  CHECK_THROWS_AS(parse_map_spec(R"({"n":0,"m":1,"kind":"builtin","name":"scherk"})"), SpecError);
  CHECK_THROWS_AS(
      parse_map_spec(R"({"n":2,"m":1,"kind":"polynomial","components":[[{"exps":[1,0]}]]})"),
      SpecError);
}

TEST_CASE("map spec round-trips through its serializer") {
  const std::string spec = R"({"n":2,"m":1,"kind":"builtin","name":"paraboloid"})";
  const GraphMap F = parse_map_spec(spec);
  const GraphMap F2 = parse_map_spec(map_spec_to_json(F));
  CHECK(F2.builtin_name == F.builtin_name);
  CHECK(map_spec_to_json(F) == map_spec_to_json(F2));
}

TEST_CASE("domain box is enforced with slack") {
  const GraphMap F = make_builtin("paraboloid");
  CHECK_NOTHROW(jacobian(F, pt2(1.0, 1.0)));
  CHECK_NOTHROW(jacobian(F, pt2(1.0 + 0.9e-12, 0.0)));
  CHECK_THROWS_AS(jacobian(F, pt2(1.1, 0.0)), DomainError);
  // custom domains narrow the box
  const GraphMap G = parse_map_spec(
      R"({"n":2,"m":1,"kind":"builtin","name":"paraboloid","domain":[[-0.5,0.5],[-0.5,0.5]]})");
  CHECK_THROWS_AS(jacobian(G, pt2(0.75, 0.0)), DomainError);
}
