#include "calibra/maps.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace calibra {
namespace {

using json = nlohmann::ordered_json;

constexpr double kBoxSlack = 1e-12;

double fd_step1(const Eigen::VectorXd& x) { return 1e-6 * std::max(1.0, x.norm()); }
double fd_step2(const Eigen::VectorXd& x) { return 1e-4 * std::max(1.0, x.norm()); }

double poly_eval(const std::vector<PolyTerm>& comp, const Eigen::VectorXd& x) {
  double v = 0.0;
  for (const auto& t : comp) {
    double mono = t.coef;
    for (int j = 0; j < x.size(); ++j) {
      for (int e = 0; e < t.exps[j]; ++e) mono *= x[j];
    }
    v += mono;
  }
  return v;
}

// d/dx_j of a monomial list, as a new monomial list
std::vector<PolyTerm> poly_derivative(const std::vector<PolyTerm>& comp, int j) {
  std::vector<PolyTerm> out;
  for (const auto& t : comp) {
    if (t.exps[j] == 0) continue;
    PolyTerm d;
    d.exps = t.exps;
    d.exps[j] -= 1;
    d.coef = t.coef * t.exps[j];
    out.push_back(std::move(d));
  }
  return out;
}

double scherk_component(const Eigen::VectorXd& x) {
  const double c1 = std::cos(x[0]);
  const double c2 = std::cos(x[1]);
  if (c1 <= 0.0 || c2 <= 0.0)
    throw DomainError("scherk: log cos undefined at |x_i| >= pi/2");
  return std::log(c1) - std::log(c2);
}

Eigen::VectorXd builtin_value(const GraphMap& F, const Eigen::VectorXd& x) {
  if (F.builtin_name == "scherk") {
    Eigen::VectorXd y(1);
    y[0] = scherk_component(x);
    return y;
  }
  internal_fail("builtin_value: no evaluator for " + F.builtin_name);
}

std::vector<std::vector<PolyTerm>> linear_components(int n, int m,
                                                     const std::vector<double>& params) {
  std::vector<std::vector<PolyTerm>> comps(static_cast<std::size_t>(m));
  for (int a = 0; a < m; ++a) {
    for (int j = 0; j < n; ++j) {
      const double c =
          params.empty() ? (a == j ? 1.0 : 0.0) : params[static_cast<std::size_t>(a * n + j)];
      if (c == 0.0) continue;
      PolyTerm t;
      t.exps = Eigen::VectorXi::Zero(n);
      t.exps[j] = 1;
      t.coef = c;
      comps[static_cast<std::size_t>(a)].push_back(std::move(t));
    }
  }
  return comps;
}

PolyTerm term(std::initializer_list<int> exps, double coef) {
  PolyTerm t;
  t.exps = Eigen::VectorXi(static_cast<int>(exps.size()));
  int j = 0;
  for (int e : exps) t.exps[j++] = e;
  t.coef = coef;
  return t;
}

std::string path_str(const std::string& path) { return path.empty() ? "document" : path; }

const json& expect(const json& j, const std::string& path, json::value_t type,
                   const char* type_name) {
  if (j.type() != type)
    throw SpecError(path_str(path) + ": expected " + type_name);
  return j;
}

int expect_positive_int(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<int>() <= 0)
    throw SpecError(path_str(path) + ": expected a positive integer");
  return j.get<int>();
}

}  // namespace

bool GraphMap::contains(const Eigen::VectorXd& x) const {
  if (x.size() != n) return false;
  for (int j = 0; j < n; ++j) {
    if (x[j] < domain_lo[j] - kBoxSlack || x[j] > domain_hi[j] + kBoxSlack) return false;
  }
  return true;
}

Eigen::VectorXd GraphMap::value(const Eigen::VectorXd& x) const {
  if (!contains(x)) {
    std::ostringstream os;
    os << "point outside the domain box: [" << x.transpose() << "]";
    throw DomainError(os.str());
  }
  if (is_polynomial_backed()) {
    Eigen::VectorXd y(m);
    for (int a = 0; a < m; ++a) y[a] = poly_eval(components[static_cast<std::size_t>(a)], x);
    return y;
  }
  return builtin_value(*this, x);
}

Jacobian jacobian(const GraphMap& F, const Eigen::VectorXd& x) {
  CALIBRA_REQUIRE(x.size() == F.n, "jacobian: point dimension mismatch");
  if (!F.contains(x)) throw DomainError("jacobian: point outside the domain box");

  Jacobian J;
  J.base_point = x;
  J.entries.resize(F.m, F.n);

  if (F.is_polynomial_backed()) {
    for (int a = 0; a < F.m; ++a) {
      for (int j = 0; j < F.n; ++j)
        J.entries(a, j) = poly_eval(poly_derivative(F.components[static_cast<std::size_t>(a)], j), x);
    }
    return J;
  }

  const double h = fd_step1(x);
  Eigen::VectorXd xp = x, xm = x;
  for (int j = 0; j < F.n; ++j) {
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;
    J.entries.col(j) = (builtin_value(F, xp) - builtin_value(F, xm)) / (2.0 * h);
    xp[j] = x[j];
    xm[j] = x[j];
  }
  return J;
}

std::vector<Eigen::MatrixXd> hessians(const GraphMap& F, const Eigen::VectorXd& x) {
  CALIBRA_REQUIRE(x.size() == F.n, "hessians: point dimension mismatch");
  if (!F.contains(x)) throw DomainError("hessians: point outside the domain box");

  std::vector<Eigen::MatrixXd> H(static_cast<std::size_t>(F.m),
                                 Eigen::MatrixXd::Zero(F.n, F.n));

  if (F.is_polynomial_backed()) {
    for (int a = 0; a < F.m; ++a) {
      const auto& comp = F.components[static_cast<std::size_t>(a)];
      for (int j = 0; j < F.n; ++j) {
        const auto dj = poly_derivative(comp, j);
        for (int k = j; k < F.n; ++k) {
          const double v = poly_eval(poly_derivative(dj, k), x);
          H[static_cast<std::size_t>(a)](j, k) = v;
          H[static_cast<std::size_t>(a)](k, j) = v;
        }
      }
    }
    return H;
  }

  const double h = fd_step2(x);
  const Eigen::VectorXd f0 = builtin_value(F, x);
  Eigen::VectorXd xs = x;
  for (int j = 0; j < F.n; ++j) {
    xs[j] = x[j] + h;
    const Eigen::VectorXd fp = builtin_value(F, xs);
    xs[j] = x[j] - h;
    const Eigen::VectorXd fm = builtin_value(F, xs);
    xs[j] = x[j];
    const Eigen::VectorXd djj = (fp - 2.0 * f0 + fm) / (h * h);
    for (int a = 0; a < F.m; ++a) H[static_cast<std::size_t>(a)](j, j) = djj[a];
  }
  for (int j = 0; j < F.n; ++j) {
    for (int k = j + 1; k < F.n; ++k) {
      xs[j] = x[j] + h; xs[k] = x[k] + h;
      Eigen::VectorXd acc = builtin_value(F, xs);
      xs[k] = x[k] - h;
      acc -= builtin_value(F, xs);
      xs[j] = x[j] - h; xs[k] = x[k] + h;
      acc -= builtin_value(F, xs);
      xs[k] = x[k] - h;
      acc += builtin_value(F, xs);
      xs[j] = x[j]; xs[k] = x[k];
      acc /= 4.0 * h * h;
      for (int a = 0; a < F.m; ++a) {
        H[static_cast<std::size_t>(a)](j, k) = acc[a];
        H[static_cast<std::size_t>(a)](k, j) = acc[a];
      }
    }
  }
  return H;
}

GraphMap make_builtin(const std::string& name, int n, int m, std::vector<double> params) {
  GraphMap F;
  F.kind = GraphMap::Kind::builtin;
  F.builtin_name = name;
  F.params = params;

  auto fix_dims = [&](int def_n, int def_m, bool rigid) {
    F.n = (n > 0) ? n : def_n;
    F.m = (m > 0) ? m : def_m;
    if (rigid && (F.n != def_n || F.m != def_m))
      throw SpecError("builtin '" + name + "' requires n=" + std::to_string(def_n) +
                      ", m=" + std::to_string(def_m));
  };

  double half_box = 1.0;
  if (name == "linear") {
    fix_dims(n > 0 ? n : 2, m > 0 ? m : (n > 0 ? n : 2), false);
    if (!params.empty() && static_cast<int>(params.size()) != F.m * F.n)
      throw SpecError("builtin 'linear': params must hold m*n = " +
                      std::to_string(F.m * F.n) + " row-major matrix entries");
    F.components = linear_components(F.n, F.m, params);
  } else if (name == "holomorphic_square") {
    fix_dims(2, 2, true);
    if (params.size() > 1) throw SpecError("builtin 'holomorphic_square': at most one parameter (scale)");
    const double s = params.empty() ? 1.0 : params[0];
    // s * ((x1^2 - x2^2)/2, x1 x2)
    F.components = {{term({2, 0}, 0.5 * s), term({0, 2}, -0.5 * s)}, {term({1, 1}, s)}};
  } else if (name == "paraboloid") {
    fix_dims(2, 1, true);
    if (!params.empty()) throw SpecError("builtin 'paraboloid': takes no parameters");
    F.components = {{term({2, 0}, 1.0), term({0, 2}, 1.0)}};
  } else if (name == "scherk") {
    fix_dims(2, 1, true);
    if (!params.empty()) throw SpecError("builtin 'scherk': takes no parameters");
    half_box = std::numbers::pi / 2.0;
  } else {
    throw SpecError("unknown builtin map '" + name + "'");
  }

  F.domain_lo = Eigen::VectorXd::Constant(F.n, -half_box);
  F.domain_hi = Eigen::VectorXd::Constant(F.n, half_box);
  return F;
}

GraphMap parse_map_spec(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SpecError(std::string("invalid JSON: ") + e.what());
  }
  expect(doc, "", json::value_t::object, "an object");

  if (!doc.contains("n")) throw SpecError("n: missing");
  if (!doc.contains("m")) throw SpecError("m: missing");
  const int n = expect_positive_int(doc["n"], "n");
  const int m = expect_positive_int(doc["m"], "m");
  if (!doc.contains("kind") || !doc["kind"].is_string())
    throw SpecError("kind: expected \"polynomial\" or \"builtin\"");
  const std::string kind = doc["kind"].get<std::string>();

  GraphMap F;
  if (kind == "polynomial") {
    F.kind = GraphMap::Kind::polynomial;
    F.n = n;
    F.m = m;
    if (!doc.contains("components") || !doc["components"].is_array())
      throw SpecError("components: expected an array");
    const auto& comps = doc["components"];
    if (static_cast<int>(comps.size()) != m)
      throw SpecError("components: expected " + std::to_string(m) + " entries, got " +
                      std::to_string(comps.size()));
    F.components.resize(static_cast<std::size_t>(m));
    for (int a = 0; a < m; ++a) {
      const std::string cpath = "components[" + std::to_string(a) + "]";
      expect(comps[static_cast<std::size_t>(a)], cpath, json::value_t::array, "an array of terms");
      int ti = 0;
      for (const auto& tj : comps[static_cast<std::size_t>(a)]) {
        const std::string tpath = cpath + "[" + std::to_string(ti++) + "]";
        expect(tj, tpath, json::value_t::object, "an object {exps, coef}");
        if (!tj.contains("exps") || !tj["exps"].is_array())
          throw SpecError(tpath + ".exps: expected an array");
        if (static_cast<int>(tj["exps"].size()) != n)
          throw SpecError(tpath + ".exps: expected length " + std::to_string(n) + ", got " +
                          std::to_string(tj["exps"].size()));
        if (!tj.contains("coef") || !tj["coef"].is_number())
          throw SpecError(tpath + ".coef: expected a number");
        PolyTerm t;
        t.exps = Eigen::VectorXi(n);
        for (int j = 0; j < n; ++j) {
          const auto& e = tj["exps"][static_cast<std::size_t>(j)];
          if (!e.is_number_integer() || e.get<int>() < 0)
            throw SpecError(tpath + ".exps[" + std::to_string(j) +
                            "]: expected a nonnegative integer");
          t.exps[j] = e.get<int>();
        }
        t.coef = tj["coef"].get<double>();
        F.components[static_cast<std::size_t>(a)].push_back(std::move(t));
      }
    }
    F.domain_lo = Eigen::VectorXd::Constant(n, -1.0);
    F.domain_hi = Eigen::VectorXd::Constant(n, 1.0);
  } else if (kind == "builtin") {
    if (!doc.contains("name") || !doc["name"].is_string())
      throw SpecError("name: expected a builtin name string");
    std::vector<double> params;
    if (doc.contains("params")) {
      if (!doc["params"].is_array()) throw SpecError("params: expected an array of numbers");
      int pi = 0;
      for (const auto& p : doc["params"]) {
        if (!p.is_number())
          throw SpecError("params[" + std::to_string(pi) + "]: expected a number");
        params.push_back(p.get<double>());
        ++pi;
      }
    }
    F = make_builtin(doc["name"].get<std::string>(), n, m, std::move(params));
  } else {
    throw SpecError("kind: expected \"polynomial\" or \"builtin\", got \"" + kind + "\"");
  }

  if (doc.contains("domain")) {
    const auto& dom = doc["domain"];
    if (!dom.is_array() || static_cast<int>(dom.size()) != n)
      throw SpecError("domain: expected an array of " + std::to_string(n) + " [lo, hi] pairs");
    for (int j = 0; j < n; ++j) {
      const auto& iv = dom[static_cast<std::size_t>(j)];
      const std::string dpath = "domain[" + std::to_string(j) + "]";
      if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number())
        throw SpecError(dpath + ": expected [lo, hi]");
      const double lo = iv[0].get<double>(), hi = iv[1].get<double>();
      if (!(lo <= hi)) throw SpecError(dpath + ": lo must not exceed hi");
      F.domain_lo[j] = lo;
      F.domain_hi[j] = hi;
    }
  }
  return F;
}

std::string map_spec_to_json(const GraphMap& F) {
  json doc;
  doc["n"] = F.n;
  doc["m"] = F.m;
  if (F.kind == GraphMap::Kind::builtin) {
    doc["kind"] = "builtin";
    doc["name"] = F.builtin_name;
    if (!F.params.empty()) doc["params"] = F.params;
  } else {
    doc["kind"] = "polynomial";
    json comps = json::array();
    for (const auto& comp : F.components) {
      json cj = json::array();
      for (const auto& t : comp) {
        json tj;
        tj["exps"] = std::vector<int>(t.exps.data(), t.exps.data() + t.exps.size());
        tj["coef"] = t.coef;
        cj.push_back(tj);
      }
      comps.push_back(cj);
    }
    doc["components"] = comps;
  }
  json dom = json::array();
  for (int j = 0; j < F.n; ++j) dom.push_back(json::array({F.domain_lo[j], F.domain_hi[j]}));
  doc["domain"] = dom;
  return doc.dump(2);
}

}  // namespace calibra
