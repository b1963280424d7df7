#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "calibra/certify.hpp"
#include "calibra/comass.hpp"
#include "calibra/frames.hpp"
#include "calibra/gallery.hpp"
#include "calibra/maps.hpp"
#include "calibra/theta.hpp"

namespace {

using calibra::DomainError;
using calibra::SpecError;
using json = nlohmann::ordered_json;

std::string fmt17(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw SpecError(std::string(what) + ": cannot parse number '" + item + "'");
    }
  }
  if (out.empty()) throw SpecError(std::string(what) + ": empty list");
  return out;
}

calibra::GridSpec parse_grid(const std::string& text, int n) {
  calibra::GridSpec g;
  g.lo.resize(n);
  g.hi.resize(n);
  g.count.assign(static_cast<std::size_t>(n), 0);
  std::stringstream ss(text);
  std::string axis;
  int seen = 0;
  while (std::getline(ss, axis, ',')) {
    const auto eq = axis.find('=');
    if (eq == std::string::npos) throw SpecError("grid: missing '=' in '" + axis + "'");
    const std::string name = axis.substr(0, eq);
    if (name != "x" + std::to_string(seen + 1))
      throw SpecError("grid: expected axis x" + std::to_string(seen + 1) + ", got '" + name + "'");
    const std::string rest = axis.substr(eq + 1);
    double lo = 0, hi = 0;
    int count = 0;
    char colon1 = 0, colon2 = 0;
    std::stringstream rs(rest);
    if (!(rs >> lo >> colon1 >> hi >> colon2 >> count) || colon1 != ':' || colon2 != ':' ||
        !(rs >> std::ws).eof())
      throw SpecError("grid: expected lo:hi:count in '" + rest + "'");
    if (count < 1) throw SpecError("grid: count must be at least 1");
    if (!(lo <= hi)) throw SpecError("grid: lo must not exceed hi");
    if (seen >= n) throw SpecError("grid: too many axes (map has n = " + std::to_string(n) + ")");
    g.lo[seen] = lo;
    g.hi[seen] = hi;
    g.count[static_cast<std::size_t>(seen)] = count;
    ++seen;
  }
  if (seen != n)
    throw SpecError("grid: expected " + std::to_string(n) + " axes, got " + std::to_string(seen));
  return g;
}

struct MapSource {
  std::string spec_path;
  std::string builtin;
  std::string params_text;
  int n = 0;
  int m = 0;

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--map", spec_path, "path to a map-spec JSON document");
    cmd->add_option("--builtin", builtin, "gallery map name (see 'calibra gallery list')");
    cmd->add_option("--params", params_text, "comma-separated builtin parameters");
    cmd->add_option("--n", n, "domain dimension override for --builtin");
    cmd->add_option("--m", m, "codomain dimension override for --builtin");
  }

  calibra::GraphMap resolve() const {
    if (spec_path.empty() == builtin.empty())
      throw SpecError("exactly one of --map and --builtin is required");
    if (!spec_path.empty()) {
      std::ifstream is(spec_path, std::ios::binary);
      if (!is) throw SpecError("cannot open map spec '" + spec_path + "'");
      std::ostringstream buf;
      buf << is.rdbuf();
      return calibra::parse_map_spec(buf.str());
    }
    std::vector<double> params;
    if (!params_text.empty()) params = parse_double_list(params_text, "--params");
    return calibra::make_builtin(builtin, n, m, std::move(params));
  }
};

std::string monomial_label(std::span<const int> I, int n) {
  std::string s;
  for (int v : I) {
    if (!s.empty()) s += "^";
    s += (v < n) ? "dx" + std::to_string(v + 1) : "dy" + std::to_string(v - n + 1);
  }
  return s.empty() ? "1" : s;
}

json form_to_json(const calibra::NFormD& a, int n) {
  json terms = json::array();
  calibra::for_each_multi_index(a.ambient_dim(), a.degree(),
                                [&](std::int64_t r, std::span<const int> I) {
                                  json t;
                                  t["monomial"] = monomial_label(I, n);
                                  t["coeff"] = a.coeffs()[r];
                                  terms.push_back(t);
                                });
  return terms;
}

void print_form(std::ostream& os, const calibra::NFormD& a, int n) {
  calibra::for_each_multi_index(a.ambient_dim(), a.degree(),
                                [&](std::int64_t r, std::span<const int> I) {
                                  os << "  " << monomial_label(I, n) << ": "
                                     << fmt17(a.coeffs()[r]) << "\n";
                                });
}

int cmd_theta(const MapSource& src, const std::string& point_text, const std::string& routes,
              const std::string& format) {
  const calibra::GraphMap F = src.resolve();
  const auto pt = parse_double_list(point_text, "--point");
  if (static_cast<int>(pt.size()) != F.n)
    throw SpecError("--point: expected " + std::to_string(F.n) + " coordinates");
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(pt.data(), static_cast<int>(pt.size()));

  const calibra::Jacobian J = calibra::jacobian(F, x);
  std::vector<calibra::ThetaForm> forms;
  forms.push_back(calibra::theta_h(J.entries));
  if (routes == "all") {
    const calibra::SvdFrame fr = calibra::svd_frame(J.entries);
    forms.push_back(calibra::theta_g(J.entries));
    forms.push_back(calibra::theta_svd(fr));
    forms.push_back(calibra::theta_svd_coords(fr));
    if (F.m == 2)
      forms.push_back(calibra::theta_codim2(J.entries.row(0).transpose(),
                                            J.entries.row(1).transpose()));
  }
  double max_dev = 0.0;
  for (std::size_t i = 0; i < forms.size(); ++i)
    for (std::size_t j = i + 1; j < forms.size(); ++j)
      max_dev = std::max(max_dev,
                         (forms[i].form - forms[j].form).coeffs().cwiseAbs().maxCoeff());

  if (format == "json") {
    json doc;
    doc["n"] = F.n;
    doc["m"] = F.m;
    json px = json::array();
    for (int i = 0; i < x.size(); ++i) px.push_back(x[i]);
    doc["point"] = px;
    json rj;
    for (const auto& tf : forms) rj[calibra::to_string(tf.route)] = form_to_json(tf.form, F.n);
    doc["routes"] = rj;
    if (forms.size() > 1) doc["max_pairwise_deviation"] = max_dev;
    std::cout << doc.dump(2) << "\n";
  } else {
    for (const auto& tf : forms) {
      std::cout << "route " << calibra::to_string(tf.route) << ":\n";
      print_form(std::cout, tf.form, F.n);
    }
    if (forms.size() > 1)
      std::cout << "max pairwise deviation: " << fmt17(max_dev) << "\n";
  }
  return 0;
}

int cmd_certify(const MapSource& src, const std::string& grid_text, const std::string& out_path,
                const std::string& format, const calibra::CertifyOptions& opts) {
  const calibra::GraphMap F = src.resolve();
  const calibra::GridSpec grid = parse_grid(grid_text, F.n);
  const calibra::RegionReport rep = calibra::certify_grid(F, grid, opts);
  const calibra::ReportFormat rf =
      (format == "json") ? calibra::ReportFormat::json : calibra::ReportFormat::csv;
  if (out_path.empty()) {
    std::cout << (rf == calibra::ReportFormat::csv ? calibra::emit_csv(rep)
                                                   : calibra::emit_json(rep));
  } else {
    calibra::emit_report(rep, out_path, rf);
    std::cerr << "wrote " << rep.points.size() << " points to " << out_path << "\n";
  }
  return 0;
}

int cmd_comass(const std::string& lambdas_text, int n, int m, int restarts,
               std::uint64_t seed, int threads, const std::string& format) {
  auto lam_list = parse_double_list(lambdas_text, "--lambdas");
  for (double v : lam_list)
    if (v < 0.0) throw SpecError("--lambdas: singular values must be nonnegative");
  if (static_cast<int>(lam_list.size()) > std::min(n, m))
    throw SpecError("--lambdas: at most min(n, m) values");
  Eigen::VectorXd lam =
      Eigen::Map<const Eigen::VectorXd>(lam_list.data(), static_cast<int>(lam_list.size()));
  std::sort(lam.data(), lam.data() + lam.size(), std::greater<double>());
  int r = 0;
  const double tol = lam.size() > 0 && lam[0] > 0.0 ? 1e-9 * lam[0] : 1e-12;
  for (int i = 0; i < lam.size(); ++i)
    if (lam[i] > tol) ++r;

  const calibra::ThetaForm th = calibra::theta_model(lam, n, m);
  calibra::ComassEstimate est = calibra::lower_bound(th, restarts, seed, threads);
  const calibra::UpperBound ub = calibra::upper_bound(lam, r);
  est.upper = ub.value;
  est.theta_star = ub.theta_star;

  if (format == "json") {
    json doc;
    doc["n"] = n;
    doc["m"] = m;
    json lj = json::array();
    for (int i = 0; i < lam.size(); ++i) lj.push_back(lam[i]);
    doc["lambdas"] = lj;
    doc["rank"] = r;
    doc["lower"] = est.lower;
    doc["upper"] = est.upper;
    doc["theta_star"] = est.theta_star;
    doc["restarts"] = est.restarts_used;
    doc["seed"] = est.seed;
    json w = json::array();
    for (int i = 0; i < est.witness.columns.rows(); ++i) {
      json row = json::array();
      for (int j = 0; j < est.witness.columns.cols(); ++j)
        row.push_back(est.witness.columns(i, j));
      w.push_back(row);
    }
    doc["witness"] = w;
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << "rank: " << r << "\n";
    std::cout << "lower: " << fmt17(est.lower) << "\n";
    std::cout << "upper: " << fmt17(est.upper) << "\n";
    std::cout << "theta_star: " << fmt17(est.theta_star) << "\n";
    std::cout << "restarts: " << est.restarts_used << "  seed: " << est.seed << "\n";
    std::cout << "witness columns (rows = ambient axes):\n";
    for (int i = 0; i < est.witness.columns.rows(); ++i) {
      std::cout << " ";
      for (int j = 0; j < est.witness.columns.cols(); ++j)
        std::cout << " " << fmt17(est.witness.columns(i, j));
      std::cout << "\n";
    }
  }
  return 0;
}

int cmd_epsilon(int rank, double tol, const std::string& format) {
  const double eps = calibra::epsilon_star(rank, tol);
  const calibra::UpperBound ub =
      calibra::maximize_f_tau(std::sqrt(eps / (rank - 1)), rank);
  // f(0) = 1 always ties the max at the found constant; nudging epsilon up
  // exposes the binding angle where the bound first fails
  const double theta_bind =
      calibra::maximize_f_tau(std::sqrt(eps * 1.000001 / (rank - 1)), rank).theta_star;
  if (format == "json") {
    json doc;
    doc["rank"] = rank;
    doc["tol"] = tol;
    doc["epsilon_star"] = eps;
    doc["theta_star"] = theta_bind;
    doc["max_f"] = ub.value;
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << "epsilon_star(" << rank << "): " << fmt17(eps) << "\n";
    std::cout << "binding theta: " << fmt17(theta_bind) << "  (max f = " << fmt17(ub.value)
              << ")\n";
  }
  return 0;
}

int cmd_gallery(const std::string& action, const std::string& name) {
  if (action == "list") {
    for (const auto& e : calibra::gallery_entries()) {
      std::cout << e.name << "  (n=" << e.n << ", m=" << e.m << ", "
                << (e.is_minimal ? "minimal" : "non-minimal") << ", domain " << e.domain_text
                << ")\n    " << e.summary << "\n";
    }
    return 0;
  }
  if (action == "show") {
    const auto& e = calibra::gallery_entry(name);
    std::cout << "name: " << e.name << "\n";
    std::cout << "definition: " << e.summary << "\n";
    std::cout << "n: " << e.n << "  m: " << e.m << "\n";
    std::cout << "domain: " << e.domain_text << "\n";
    std::cout << "minimal: " << (e.is_minimal ? "yes" : "no") << "\n";
    std::cout << "notes: " << e.notes << "\n";
    return 0;
  }
  throw SpecError("gallery: expected 'list' or 'show NAME'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"calibra: calibrating forms and area-minimizing certification for graphs"};
  app.require_subcommand(1);

  // theta
  auto* theta_cmd = app.add_subcommand("theta", "print the calibrating form at a point");
  MapSource theta_src;
  theta_src.add_flags(theta_cmd);
  std::string theta_point, theta_routes = "canonical", theta_format = "text";
  theta_cmd->add_option("--point", theta_point, "evaluation point, comma-separated")->required();
  theta_cmd->add_option("--routes", theta_routes, "canonical | all")
      ->check(CLI::IsMember({"canonical", "all"}));
  theta_cmd->add_option("--format", theta_format, "text | json")
      ->check(CLI::IsMember({"text", "json"}));

  // certify
  auto* cert_cmd = app.add_subcommand("certify", "sweep a grid and certify calibration");
  MapSource cert_src;
  cert_src.add_flags(cert_cmd);
  std::string cert_grid, cert_out, cert_format = "csv";
  calibra::CertifyOptions opts;
  int cert_threads = 0;
  cert_cmd->add_option("--grid", cert_grid, "grid as x1=lo:hi:count,x2=...")->required();
  cert_cmd->add_option("--out", cert_out, "output path (stdout when omitted)");
  cert_cmd->add_option("--format", cert_format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  cert_cmd->add_option("--minimality-tol", opts.minimality_tol, "threshold on the residual norm")
      ->check(CLI::PositiveNumber);
  cert_cmd->add_option("--comass-tol", opts.comass_tol, "slack for comass_bound_only")
      ->check(CLI::PositiveNumber);
  cert_cmd->add_flag("--lower", opts.compute_lower, "also run the comass optimizer per point");
  cert_cmd->add_option("--restarts", opts.restarts, "optimizer restarts")->check(CLI::PositiveNumber);
  cert_cmd->add_option("--seed", opts.seed, "optimizer seed");
  cert_cmd->add_option("--threads", cert_threads, "worker threads (or env CALIBRA_THREADS)")
      ->check(CLI::PositiveNumber);

  // comass
  auto* com_cmd = app.add_subcommand("comass", "bracket the comass for given singular values");
  std::string com_lambdas, com_format = "text";
  int com_n = 0, com_m = 0, com_restarts = 64, com_threads = 0;
  std::uint64_t com_seed = 0;
  com_cmd->add_option("--lambdas", com_lambdas, "singular values, comma-separated")->required();
  com_cmd->add_option("--n", com_n, "domain dimension")->required()->check(CLI::PositiveNumber);
  com_cmd->add_option("--m", com_m, "codomain dimension")->required()->check(CLI::PositiveNumber);
  com_cmd->add_option("--restarts", com_restarts, "optimizer restarts")->check(CLI::PositiveNumber);
  com_cmd->add_option("--seed", com_seed, "optimizer seed");
  com_cmd->add_option("--threads", com_threads, "workers for the restarts (or env CALIBRA_THREADS)")
      ->check(CLI::PositiveNumber);
  com_cmd->add_option("--format", com_format, "text | json")
      ->check(CLI::IsMember({"text", "json"}));

  // epsilon
  auto* eps_cmd = app.add_subcommand("epsilon", "refined two-dilation constant for a rank");
  int eps_rank = 0;
  double eps_tol = 1e-10;
  std::string eps_format = "text";
  eps_cmd->add_option("--rank", eps_rank, "rank r >= 2")->required();
  eps_cmd->add_option("--tol", eps_tol, "bisection tolerance");
  eps_cmd->add_option("--format", eps_format, "text | json")
      ->check(CLI::IsMember({"text", "json"}));

  // gallery
  auto* gal_cmd = app.add_subcommand("gallery", "list or show the builtin maps");
  std::string gal_action, gal_name;
  gal_cmd->add_option("action", gal_action, "list | show")->required();
  gal_cmd->add_option("name", gal_name, "map name for 'show'");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (theta_cmd->parsed()) return cmd_theta(theta_src, theta_point, theta_routes, theta_format);
    if (cert_cmd->parsed()) {
      if (cert_threads > 0) {
        opts.threads = cert_threads;
      } else if (const char* env = std::getenv("CALIBRA_THREADS")) {
        const int t = std::atoi(env);
        if (t > 0) opts.threads = t;
      }
      return cmd_certify(cert_src, cert_grid, cert_out, cert_format, opts);
    }
    if (com_cmd->parsed()) {
      int threads = com_threads;
      if (threads <= 0) {
        if (const char* env = std::getenv("CALIBRA_THREADS")) {
          const int t = std::atoi(env);
          if (t > 0) threads = t;
        }
      }
      return cmd_comass(com_lambdas, com_n, com_m, com_restarts, com_seed,
                        std::max(1, threads), com_format);
    }
    if (eps_cmd->parsed()) {
      if (eps_rank < 2) throw SpecError("--rank must be at least 2");
      if (eps_tol <= 0.0) throw SpecError("--tol must be positive");
      return cmd_epsilon(eps_rank, eps_tol, eps_format);
    }
    if (gal_cmd->parsed()) return cmd_gallery(gal_action, gal_name);
  } catch (const SpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
