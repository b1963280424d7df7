#include "calibra/certify.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "calibra/frames.hpp"
#include "calibra/minimality.hpp"
#include "calibra/theta.hpp"

namespace calibra {

using json = nlohmann::ordered_json;

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::calibrated_crude: return "calibrated_crude";
    case Verdict::calibrated_refined: return "calibrated_refined";
    case Verdict::comass_bound_only: return "comass_bound_only";
    case Verdict::not_certified: return "not_certified";
    case Verdict::not_minimal: return "not_minimal";
  }
  return "?";
}

Verdict verdict_from_string(const std::string& s) {
  for (Verdict v : {Verdict::calibrated_crude, Verdict::calibrated_refined,
                    Verdict::comass_bound_only, Verdict::not_certified, Verdict::not_minimal}) {
    if (s == to_string(v)) return v;
  }
  throw SpecError("unknown verdict '" + s + "'");
}

std::int64_t GridSpec::total() const {
  std::int64_t t = 1;
  for (int c : count) t *= c;
  return t;
}

Eigen::VectorXd GridSpec::point(std::int64_t flat) const {
  const int n = static_cast<int>(count.size());
  Eigen::VectorXd x(n);
  for (int j = n - 1; j >= 0; --j) {
    const std::int64_t c = count[static_cast<std::size_t>(j)];
    const std::int64_t i = flat % c;
    flat /= c;
    x[j] = (c <= 1) ? lo[j] : lo[j] + (hi[j] - lo[j]) * static_cast<double>(i) /
                                          static_cast<double>(c - 1);
  }
  return x;
}

namespace {

Verdict decide(double mgs_norm, const DilationCheck& dc, double upper,
               const CertifyOptions& opts) {
  if (mgs_norm > opts.minimality_tol) return Verdict::not_minimal;
  if (dc.crude_ok) return Verdict::calibrated_crude;
  if (dc.refined_ok) return Verdict::calibrated_refined;
  if (upper <= 1.0 + opts.comass_tol) return Verdict::comass_bound_only;
  return Verdict::not_certified;
}

void run_indexed(std::int64_t total, int threads, const std::function<void(std::int64_t)>& body) {
  if (threads <= 1) {
    for (std::int64_t i = 0; i < total; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      try {
        for (std::int64_t i = t; i < total; i += threads) body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::string fmt17(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

RegionReport certify_grid(const GraphMap& F, const GridSpec& grid, const CertifyOptions& opts) {
  CALIBRA_REQUIRE(static_cast<int>(grid.count.size()) == F.n &&
                      grid.lo.size() == F.n && grid.hi.size() == F.n,
                  "certify_grid: grid dimension mismatch");
  for (int j = 0; j < F.n; ++j) {
    CALIBRA_REQUIRE(grid.count[static_cast<std::size_t>(j)] >= 0, "certify_grid: negative count");
    if (grid.lo[j] < F.domain_lo[j] - 1e-12 || grid.hi[j] > F.domain_hi[j] + 1e-12)
      throw DomainError("certify_grid: grid leaves the domain box");
  }

  RegionReport rep;
  rep.grid = grid;
  rep.options = opts;
  rep.lambda_count = std::min(F.n, F.m);

  // epsilon_star per possible rank, computed up front so workers only read
  const int max_rank = std::min(F.n, F.m);
  for (int r = 2; r <= max_rank; ++r)
    rep.epsilon_by_rank[r] = epsilon_star(r, opts.epsilon_tol);

  const std::int64_t total = grid.total();
  rep.points.assign(static_cast<std::size_t>(total), PointReport{});

  const double nan = std::numeric_limits<double>::quiet_NaN();
  run_indexed(total, opts.threads, [&](std::int64_t i) {
    PointReport& pr = rep.points[static_cast<std::size_t>(i)];
    pr.point = grid.point(i);
    try {
      const Jacobian J = jacobian(F, pr.point);
      const SvdFrame fr = svd_frame(J.entries);
      pr.rank_r = fr.rank_r;
      pr.lambdas = fr.lambdas;
      pr.max_pair_product = (fr.lambdas.size() >= 2) ? fr.lambdas[0] * fr.lambdas[1] : 0.0;
      pr.mgs_norm = mgs_residual(F, pr.point).norm();
      pr.dtheta_norm = dtheta_residual(F, pr.point);
      pr.upper = upper_bound(fr.lambdas, fr.rank_r).value;

      const double eps_pt = (fr.rank_r >= 2) ? rep.epsilon_by_rank.at(fr.rank_r) : 0.0;
      const DilationCheck dc = dilation_check(fr.lambdas, fr.rank_r, eps_pt);
      pr.pointwise_verdict = decide(pr.mgs_norm, dc, pr.upper, opts);

      if (opts.compute_lower) {
        const ThetaForm th = theta_h(J.entries);
        pr.lower = lower_bound(th, opts.restarts, opts.seed).lower;
        pr.lower_computed = true;
      }
    } catch (const DomainError& e) {
      // singular builtin or missing stencil margin: report it, keep sweeping
      pr.error = e.what();
      pr.rank_r = 0;
      pr.lambdas = Eigen::VectorXd::Constant(rep.lambda_count, nan);
      pr.max_pair_product = nan;
      pr.mgs_norm = nan;
      pr.dtheta_norm = nan;
      pr.upper = nan;
      pr.pointwise_verdict = Verdict::not_certified;
    }
  });

  rep.global_rank = 0;
  for (const auto& pr : rep.points) rep.global_rank = std::max(rep.global_rank, pr.rank_r);
  const double eps_glob = (rep.global_rank >= 2)
                              ? rep.epsilon_by_rank.at(rep.global_rank)
                              : 0.0;
  for (auto& pr : rep.points) {
    if (pr.error.empty()) {
      const DilationCheck dcg = dilation_check(pr.lambdas, rep.global_rank, eps_glob);
      pr.global_verdict = decide(pr.mgs_norm, dcg, pr.upper, opts);
    } else {
      pr.global_verdict = Verdict::not_certified;
    }
    rep.pointwise_counts[to_string(pr.pointwise_verdict)] += 1;
    rep.global_counts[to_string(pr.global_verdict)] += 1;
  }
  return rep;
}

std::string emit_csv(const RegionReport& rep) {
  const int n = static_cast<int>(rep.grid.count.size());
  const int nl = rep.lambda_count;
  std::ostringstream os;
  for (int j = 0; j < n; ++j) os << "x_" << (j + 1) << ",";
  os << "rank,";
  for (int i = 0; i < nl; ++i) os << "lambda_" << (i + 1) << ",";
  os << "max_pair_product,mgs_norm,dtheta_norm,comass_upper,comass_lower,"
     << "pointwise_verdict,global_verdict\n";
  for (const auto& pr : rep.points) {
    for (int j = 0; j < n; ++j) os << fmt17(pr.point[j]) << ",";
    os << pr.rank_r << ",";
    for (int i = 0; i < nl; ++i) os << fmt17(pr.lambdas[i]) << ",";
    os << fmt17(pr.max_pair_product) << "," << fmt17(pr.mgs_norm) << ","
       << fmt17(pr.dtheta_norm) << "," << fmt17(pr.upper) << ",";
    if (pr.lower_computed) os << fmt17(pr.lower);
    os << "," << to_string(pr.pointwise_verdict) << "," << to_string(pr.global_verdict)
       << "\n";
  }
  return os.str();
}

namespace {

// non-finite values travel as JSON null and come back as NaN
json num_to_json(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

double num_from_json(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json vec_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(num_to_json(v[i]));
  return a;
}

Eigen::VectorXd vec_from_json(const json& a) {
  Eigen::VectorXd v(a.size());
  int i = 0;
  for (const auto& x : a) v[i++] = num_from_json(x);
  return v;
}

}  // namespace

std::string emit_json(const RegionReport& rep) {
  json doc;
  json grid;
  grid["lo"] = vec_to_json(rep.grid.lo);
  grid["hi"] = vec_to_json(rep.grid.hi);
  grid["count"] = rep.grid.count;
  doc["grid"] = grid;

  json cfg;
  cfg["minimality_tol"] = rep.options.minimality_tol;
  cfg["comass_tol"] = rep.options.comass_tol;
  cfg["epsilon_tol"] = rep.options.epsilon_tol;
  cfg["compute_lower"] = rep.options.compute_lower;
  cfg["restarts"] = rep.options.restarts;
  cfg["seed"] = rep.options.seed;
  cfg["threads"] = rep.options.threads;
  doc["config"] = cfg;

  doc["global_rank"] = rep.global_rank;
  doc["lambda_count"] = rep.lambda_count;
  json eps = json::object();
  for (const auto& [r, e] : rep.epsilon_by_rank) eps[std::to_string(r)] = e;
  doc["epsilon_by_rank"] = eps;

  doc["summary"] = json::object();
  doc["summary"]["pointwise"] = rep.pointwise_counts;
  doc["summary"]["global"] = rep.global_counts;

  json pts = json::array();
  for (const auto& pr : rep.points) {
    json p;
    p["point"] = vec_to_json(pr.point);
    p["rank_r"] = pr.rank_r;
    p["lambdas"] = vec_to_json(pr.lambdas);
    p["max_pair_product"] = num_to_json(pr.max_pair_product);
    p["mgs_norm"] = num_to_json(pr.mgs_norm);
    p["dtheta_norm"] = num_to_json(pr.dtheta_norm);
    p["upper"] = num_to_json(pr.upper);
    if (pr.lower_computed)
      p["lower"] = pr.lower;
    else
      p["lower"] = nullptr;
    p["pointwise_verdict"] = to_string(pr.pointwise_verdict);
    p["global_verdict"] = to_string(pr.global_verdict);
    p["error"] = pr.error;
    pts.push_back(p);
  }
  doc["points"] = pts;
  return doc.dump(2) + "\n";
}

RegionReport parse_report_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecError(std::string("invalid report JSON: ") + e.what());
  }
  RegionReport rep;
  rep.grid.lo = vec_from_json(doc.at("grid").at("lo"));
  rep.grid.hi = vec_from_json(doc.at("grid").at("hi"));
  rep.grid.count = doc.at("grid").at("count").get<std::vector<int>>();
  const auto& cfg = doc.at("config");
  rep.options.minimality_tol = cfg.at("minimality_tol").get<double>();
  rep.options.comass_tol = cfg.at("comass_tol").get<double>();
  rep.options.epsilon_tol = cfg.at("epsilon_tol").get<double>();
  rep.options.compute_lower = cfg.at("compute_lower").get<bool>();
  rep.options.restarts = cfg.at("restarts").get<int>();
  rep.options.seed = cfg.at("seed").get<std::uint64_t>();
  rep.options.threads = cfg.at("threads").get<int>();
  rep.global_rank = doc.at("global_rank").get<int>();
  rep.lambda_count = doc.at("lambda_count").get<int>();
  for (const auto& [k, v] : doc.at("epsilon_by_rank").items())
    rep.epsilon_by_rank[std::stoi(k)] = v.get<double>();
  for (const auto& [k, v] : doc.at("summary").at("pointwise").items())
    rep.pointwise_counts[k] = v.get<std::int64_t>();
  for (const auto& [k, v] : doc.at("summary").at("global").items())
    rep.global_counts[k] = v.get<std::int64_t>();
  for (const auto& pj : doc.at("points")) {
    PointReport pr;
    pr.point = vec_from_json(pj.at("point"));
    pr.rank_r = pj.at("rank_r").get<int>();
    pr.lambdas = vec_from_json(pj.at("lambdas"));
    pr.max_pair_product = num_from_json(pj.at("max_pair_product"));
    pr.mgs_norm = num_from_json(pj.at("mgs_norm"));
    pr.dtheta_norm = num_from_json(pj.at("dtheta_norm"));
    pr.upper = num_from_json(pj.at("upper"));
    if (!pj.at("lower").is_null()) {
      pr.lower = pj.at("lower").get<double>();
      pr.lower_computed = true;
    }
    pr.pointwise_verdict = verdict_from_string(pj.at("pointwise_verdict").get<std::string>());
    pr.global_verdict = verdict_from_string(pj.at("global_verdict").get<std::string>());
    pr.error = pj.at("error").get<std::string>();
    rep.points.push_back(std::move(pr));
  }
  return rep;
}

void emit_report(const RegionReport& rep, const std::string& path, ReportFormat format) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DomainError("emit_report: cannot open '" + path + "' for writing");
  os << (format == ReportFormat::csv ? emit_csv(rep) : emit_json(rep));
  if (!os.good()) throw DomainError("emit_report: write failed for '" + path + "'");
}

}  // namespace calibra
