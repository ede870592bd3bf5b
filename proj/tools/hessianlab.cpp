// hessianlab: batch front-end for the toolkit. One command per process.
//
// Every command merges an optional JSON config with flag overrides, runs the
// corresponding library operation, and writes a JSON report plus CSV tables
// under the output directory. Exit codes: 0 = PASS/complete, 2 = an audit
// failed (artifacts are still written), 1 = error. Reports embed the config
// hash and toolkit version and carry no wall-clock data, so identical configs
// and seeds produce byte-identical artifacts.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hessianlab/audits.hpp"
#include "hessianlab/barriers.hpp"
#include "hessianlab/dirichlet.hpp"
#include "hessianlab/experiments.hpp"
#include "hessianlab/families.hpp"
#include "hessianlab/gallery.hpp"
#include "hessianlab/io.hpp"
#include "hessianlab/pogorelov.hpp"
#include "hessianlab/sigma.hpp"
#include "hessianlab/version.hpp"

namespace hl = hessianlab;
using nlohmann::json;

namespace {

constexpr std::uint64_t kDefaultSeed = 424242;

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  return json::parse(in);  // parse_error messages are line-referenced
}

// A field spec given as a string names a JSON file holding the actual spec.
json resolve_spec(const json& spec) {
  if (spec.is_string()) return load_json_file(spec.get<std::string>());
  return spec;
}

hl::Domain domain_from(const json& cfg) {
  hl::Domain dom{hl::DomainKind::kBall, 1.0};
  if (cfg.contains("domain")) {
    const json& d = cfg.at("domain");
    const std::string kind = d.value("kind", "ball");
    if (kind == "box")
      dom.kind = hl::DomainKind::kBox;
    else if (kind != "ball")
      throw std::invalid_argument("config: unknown domain kind \"" + kind + "\"");
    dom.radius = d.value("radius", 1.0);
  }
  return dom;
}

std::filesystem::path out_dir(const json& cfg) {
  const std::filesystem::path p = cfg.value("out", std::string("."));
  std::filesystem::create_directories(p);
  return p;
}

json vec_json(const hl::Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json mat_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json quad_json(const hl::QuadraticForm& q) {
  return {{"matrix", mat_json(q.hessian().dense())},
          {"linear", vec_json(q.linear())},
          {"constant", q.constant()}};
}

double elementary_symmetric(const Eigen::VectorXd& lam, int k) {
  std::vector<double> e(static_cast<std::size_t>(k) + 1, 0.0);
  e[0] = 1.0;
  for (int i = 0; i < lam.size(); ++i)
    for (int j = std::min<int>(k, i + 1); j >= 1; --j) e[j] += lam[i] * e[j - 1];
  return e[static_cast<std::size_t>(k)];
}

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

hl::DirichletProblem problem_from(const json& cfg) {
  hl::DirichletProblem p;
  p.n = cfg.value("n", 3);
  p.k = cfg.value("k", 2);
  p.domain = domain_from(cfg);
  p.rhs = hl::make_field(resolve_spec(cfg.value("rhs", json{{"type", "constant"}, {"value", 1.0}})),
                         p.n);
  if (!cfg.contains("boundary"))
    throw std::invalid_argument("config: a boundary spec is required");
  p.boundary = hl::make_field(resolve_spec(cfg.at("boundary")), p.n);
  return p;
}

// Audited data comes either from a direct field sample ("field") or from a
// fresh solve ("boundary" + optional "rhs").
hl::GridFunction acquire_target(const json& cfg) {
  const int n = cfg.value("n", 3);
  const int res = cfg.value("resolution", 16);
  if (cfg.contains("field")) {
    const auto g = std::make_shared<const hl::Grid>(n, domain_from(cfg), res);
    return hl::sample_field(g, *hl::make_field(resolve_spec(cfg.at("field")), n));
  }
  return hl::solve_dirichlet(problem_from(cfg), res).first;
}

std::vector<std::size_t> sample_nodes(const json& cfg, const hl::Grid& g) {
  std::vector<std::size_t> nodes;
  if (cfg.contains("samples")) {
    for (const auto& entry : cfg.at("samples")) {
      if (!entry.is_array() || static_cast<int>(entry.size()) != g.dim())
        throw std::invalid_argument("config: each sample must list n coordinates");
      hl::Vec x(g.dim());
      for (int i = 0; i < g.dim(); ++i) x[i] = entry[i].get<double>();
      nodes.push_back(g.nearest_node(x));
    }
  } else {
    nodes.push_back(g.nearest_node(hl::Vec::Zero(g.dim())));
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

json audit_to_json(const hl::ConvexityAuditReport& audit) {
  json scans = json::array();
  for (const auto& s : audit.scans)
    scans.push_back({{"node", s.node},
                     {"delta", s.delta},
                     {"threshold", s.threshold},
                     {"set_size", s.set_size},
                     {"dimension", s.dimension}});
  json offenders = json::array();
  for (const auto& o : audit.offenders)
    offenders.push_back({{"node", o.node}, {"dimension", o.dimension}});
  return {{"passed", audit.passed}, {"scans", scans}, {"offenders", offenders}};
}

void write_scan_table(const hl::ConvexityAuditReport& audit, const std::filesystem::path& path) {
  hl::CsvWriter csv({"node", "delta", "threshold", "set_size", "dimension"});
  for (const auto& s : audit.scans)
    csv.add_row({static_cast<double>(s.node), s.delta, s.threshold,
                 static_cast<double>(s.set_size), static_cast<double>(s.dimension)});
  csv.write(path.string());
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

int cmd_solve(const json& cfg) {
  const int res = cfg.value("resolution", 16);
  const hl::DirichletProblem p = problem_from(cfg);
  const auto [u, rep] = hl::solve_dirichlet(p, res);

  json report = hl::report_envelope("solve", cfg);
  report["n"] = p.n;
  report["k"] = p.k;
  report["resolution"] = res;
  report["iterations"] = rep.iterations;
  report["residual"] = rep.residual;
  report["cone_violations"] = rep.cone_violations;
  report["converged"] = rep.converged;
  report["residual_history"] = rep.residual_history;

  const auto dir = out_dir(cfg);
  hl::write_json((dir / "report.json").string(), report);
  hl::write_grid_function((dir / "solution.hgf1").string(), u);
  std::cout << "solve: residual " << rep.residual << " after " << rep.iterations
            << " sweeps -> " << dir.string() << "\n";
  return 0;
}

int cmd_audit_flatset(const json& cfg) {
  const hl::GridFunction u = acquire_target(cfg);
  const auto nodes = sample_nodes(cfg, u.grid());
  const auto audit = hl::strict_2convexity_audit(u, nodes);

  json report = hl::report_envelope("audit-flatset", cfg);
  report["audit"] = audit_to_json(audit);

  const auto dir = out_dir(cfg);
  hl::write_json((dir / "report.json").string(), report);
  write_scan_table(audit, dir / "scans.csv");

  int worst = 0;
  for (const auto& s : audit.scans) worst = std::max(worst, s.dimension);
  std::cout << "audit-flatset: " << (audit.passed ? "PASS" : "FAIL") << ", worst dimension "
            << worst << " -> " << dir.string() << "\n";
  return audit.passed ? 0 : 2;
}

int cmd_certify(const json& cfg) {
  const hl::GridFunction u = acquire_target(cfg);
  const auto nodes = sample_nodes(cfg, u.grid());
  const auto audit = hl::strict_2convexity_audit(u, nodes);

  json report = hl::report_envelope("certify", cfg);
  report["audit"] = audit_to_json(audit);

  const auto dir = out_dir(cfg);
  if (audit.passed) {
    report["certificates"] = json::array();
    hl::write_json((dir / "report.json").string(), report);
    std::cout << "certify: audit passed, nothing to certify -> " << dir.string() << "\n";
    return 0;
  }

  json certs = json::array();
  hl::CsvWriter landscape(
      {"offender", "height", "slope", "margin_boundary", "margin_center", "margin_ellipticity"});
  std::size_t found = 0;
  for (std::size_t i = 0; i < audit.offenders.size(); ++i) {
    const auto& off = audit.offenders[i];
    const hl::CertificateSearch search = hl::theorem1_certificate(u, off.plane, off.frame);
    for (const auto& row : search.landscape)
      landscape.add_row({static_cast<double>(i), row.height, row.slope, row.margin_boundary,
                         row.margin_center, row.margin_ellipticity});

    json c;
    c["offender_node"] = off.node;
    c["found"] = search.found();
    if (search.found()) {
      ++found;
      const hl::Certificate& cert = *search.certificate;
      c["base_point"] = vec_json(cert.base_point);
      c["frame"] = mat_json(cert.frame);
      c["slope"] = cert.slope;
      c["h"] = cert.h;
      c["height"] = cert.height;
      c["rho"] = cert.rho;
      c["margins"] = {{"boundary", cert.margin_boundary},
                      {"center", cert.margin_center},
                      {"ellipticity", cert.margin_ellipticity}};
      c["barrier"] = quad_json(cert.barrier);
      c["touching"] = quad_json(cert.touching);
      c["touch_node"] = cert.touch_node;
      c["touch_point"] = vec_json(u.grid().coord(cert.touch_node));
      c["touch_radius"] = cert.touch_radius;
    }
    certs.push_back(c);
  }
  report["certificates"] = certs;

  hl::write_json((dir / "report.json").string(), report);
  write_scan_table(audit, dir / "scans.csv");
  landscape.write((dir / "landscape.csv").string());
  std::cout << "certify: audit FAIL, " << found << " of " << audit.offenders.size()
            << " offender(s) certified -> " << dir.string() << "\n";
  return 2;
}

int cmd_barriers(const json& cfg) {
  const int n = cfg.value("n", 3);
  const double h = cfg.value("h", 0.1);
  const double H = cfg.value("H", 1.0);

  const double closed = hl::barrier_sigma2_value(h, H, n);
  const hl::QuadraticForm barrier = hl::make_cylinder_barrier(h, H, n);
  const double minors = hl::sigma_k(barrier.hessian(), 2);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(barrier.hessian().dense(),
                                                    Eigen::EigenvaluesOnly);
  const double eigen_path = elementary_symmetric(es.eigenvalues(), 2);
  const double hs = hl::h_star(n, H);
  bool agree = close_rel(closed, minors, 1e-12) && close_rel(closed, eigen_path, 1e-12);

  json report = hl::report_envelope("barriers", cfg);
  report["n"] = n;
  report["h"] = h;
  report["H"] = H;
  report["cylinder"] = {{"sigma2_closed_form", closed},
                        {"sigma2_minor_path", minors},
                        {"sigma2_eigenvalue_path", eigen_path},
                        {"h_star", hs},
                        {"h_within_h_star", h <= hs},
                        {"below_one", closed < 1.0}};

  if (cfg.contains("delta")) {
    const double delta = cfg.at("delta").get<double>();
    const hl::QuadraticForm w = hl::make_wdelta(delta, n);
    const double w_closed = 2.0 * delta * delta * (n - 2) * (n - 3);
    const double w_minors = hl::sigma_k(w.hessian(), 2);
    const bool cone =
        hl::cone_membership(w.hessian(), 2, hl::ConeMode::kClosed).holds(hl::ConeMode::kClosed);
    agree = agree && close_rel(w_closed, w_minors, 1e-12) && cone;
    report["comparison"] = {{"delta", delta},
                            {"sigma2_closed_form", w_closed},
                            {"sigma2_minor_path", w_minors},
                            {"closed_cone_member", cone}};
  }
  report["agreement"] = agree;

  const auto dir = out_dir(cfg);
  hl::write_json((dir / "report.json").string(), report);
  std::cout << "barriers: sigma_2(P) = " << closed << ", oracle "
            << (agree ? "agreement" : "DISAGREEMENT") << " -> " << dir.string() << "\n";
  return agree ? 0 : 2;
}

int cmd_pogorelov(const json& cfg) {
  json report = hl::report_envelope("pogorelov", cfg);
  const auto dir = out_dir(cfg);
  if (!cfg.contains("boundary") && !cfg.contains("gallery"))
    throw std::invalid_argument(
        "config: pogorelov needs a solved instance (boundary) or a gallery block");

  if (cfg.contains("boundary")) {
    if (!cfg.contains("comparison"))
      throw std::invalid_argument("config: pogorelov needs a quadratic \"comparison\" w");
    const int res = cfg.value("resolution", 16);
    const hl::DirichletProblem p = problem_from(cfg);
    const auto [u, rep] = hl::solve_dirichlet(p, res);
    const hl::QuadraticForm w = hl::quadratic_from_json(resolve_spec(cfg.at("comparison")), p.n);
    const auto region = hl::origin_component(u, w);
    if (region.empty())
      throw std::runtime_error("pogorelov: the origin is not inside {u < w}");
    const double value = hl::pogorelov_functional(u, w, region);
    report["instance"] = {{"n", p.n},
                          {"resolution", res},
                          {"solver_residual", rep.residual},
                          {"comparison", quad_json(w)},
                          {"region_size", region.size()},
                          {"functional", value}};
    std::cout << "pogorelov: functional " << value << " over " << region.size() << " node(s)\n";
  }

  if (cfg.contains("gallery")) {
    const json& gal = cfg.at("gallery");
    const int gk = gal.value("k", 3);
    const int gn = gal.value("n", 4);
    const double coef = gal.value("coef", 1.0);
    const hl::PogorelovCandidate cand = hl::pogorelov_gallery(gk, gn, coef);
    std::vector<double> radii{1e-1, 1e-2, 1e-3};
    if (gal.contains("radii")) radii = gal.at("radii").get<std::vector<double>>();
    // Sample off the convexity window edge: sigma_k flips sign outside it.
    const double axial = gal.value("axial", std::min(0.1, 0.5 * cand.convex_axial_halfwidth()));

    hl::CsvWriter table({"radius", "hessian_norm", "sigma_value"});
    json rows = json::array();
    for (const double r : radii) {
      hl::Vec x = hl::Vec::Zero(gn);
      x[0] = r;
      x[gn - 1] = axial;
      const hl::SymmetricMatrix hx = cand.hessian(x);
      const double norm = hl::spectral_norm(hx);
      const double sig = hl::sigma_k(hx, gk);
      table.add_row({r, norm, sig});
      rows.push_back({{"radius", r}, {"hessian_norm", norm}, {"sigma_value", sig}});
    }
    table.write((dir / "gallery.csv").string());

    // sigma_k bracket over the annulus 0.01 <= |x'| <= 1 inside the window.
    const double tw = 0.95 * cand.convex_axial_halfwidth();
    double s_min = std::numeric_limits<double>::infinity(), s_max = 0.0;
    for (int ri = 0; ri <= 40; ++ri) {
      const double r = 0.01 * std::pow(100.0, ri / 40.0);
      for (int ti = -8; ti <= 8; ++ti) {
        hl::Vec x = hl::Vec::Zero(gn);
        x[0] = r;
        x[gn - 1] = tw * ti / 8.0;
        const double s = hl::sigma_k(cand.hessian(x), gk);
        s_min = std::min(s_min, s);
        s_max = std::max(s_max, s);
      }
    }
    report["gallery"] = {{"k", gk},           {"n", gn},
                         {"coef", coef},      {"axial", axial},
                         {"rows", rows},      {"annulus_sigma_min", s_min},
                         {"annulus_sigma_max", s_max}};
    std::cout << "pogorelov: gallery swept " << radii.size() << " radii (k = " << gk
              << ", n = " << gn << "), annulus sigma in [" << s_min << ", " << s_max << "]\n";
  }

  hl::write_json((dir / "report.json").string(), report);
  std::cout << "pogorelov: report -> " << dir.string() << "\n";
  return 0;
}

int cmd_modulus(const json& cfg) {
  const int n = cfg.value("n", 3);
  const int res = cfg.value("resolution", 16);
  const std::size_t count = cfg.value("count", std::size_t{10});
  const std::uint64_t seed = cfg.value("seed", kDefaultSeed);
  const double sup_bound = cfg.value("K", 4.0);
  const double width = cfg.value("r", 0.1);

  const auto family = hl::unit_sigma2_quadratics(n, count, seed);
  const auto solved = hl::solve_quadratic_family(family, n, res);
  const hl::ModulusTable table = hl::modulus_experiment(solved, sup_bound, width);

  json report = hl::report_envelope("modulus", cfg);
  report["n"] = n;
  report["resolution"] = res;
  report["count"] = count;
  report["seed"] = seed;
  report["K"] = sup_bound;
  report["r"] = width;
  json rows = json::array();
  hl::CsvWriter csv({"member", "delta", "flagged"});
  std::size_t flagged = 0;
  for (const auto& row : table.rows) {
    rows.push_back({{"member", row.member}, {"delta", row.delta}, {"flagged", row.flagged}});
    csv.add_row({static_cast<double>(row.member), row.delta, row.flagged ? 1.0 : 0.0});
    flagged += row.flagged ? 1 : 0;
  }
  report["rows"] = rows;
  report["flagged"] = flagged;
  report["family_min"] = table.family_min;

  const auto dir = out_dir(cfg);
  hl::write_json((dir / "report.json").string(), report);
  csv.write((dir / "modulus.csv").string());
  std::cout << "modulus: family delta " << table.family_min << ", " << flagged
            << " flagged member(s) -> " << dir.string() << "\n";
  return flagged == 0 ? 0 : 2;
}

int cmd_c2(const json& cfg) {
  const int n = cfg.value("n", 3);
  const int res = cfg.value("resolution", 16);
  if (!cfg.contains("family") || !cfg.at("family").is_array() || cfg.at("family").empty())
    throw std::invalid_argument("config: c2 needs a non-empty \"family\" of boundary specs");

  std::vector<hl::FieldPtr> family;
  for (const auto& spec : cfg.at("family")) family.push_back(hl::make_field(resolve_spec(spec), n));
  const auto rows = hl::c2_at_origin_experiment(family, n, res);

  json report = hl::report_envelope("c2", cfg);
  report["n"] = n;
  report["resolution"] = res;
  json jrows = json::array();
  hl::CsvWriter csv({"member", "sup_norm", "hessian_norm"});
  for (std::size_t m = 0; m < rows.size(); ++m) {
    jrows.push_back({{"member", m}, {"sup_norm", rows[m].sup_norm},
                     {"hessian_norm", rows[m].hessian_norm}});
    csv.add_row({static_cast<double>(m), rows[m].sup_norm, rows[m].hessian_norm});
  }
  report["rows"] = jrows;

  const auto dir = out_dir(cfg);
  hl::write_json((dir / "report.json").string(), report);
  csv.write((dir / "c2.csv").string());
  std::cout << "c2: " << rows.size() << " member(s) solved -> " << dir.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// Plumbing
// ---------------------------------------------------------------------------

struct Overrides {
  int n = 0, k = 0, res = 0;
  double h = 0.0, H = 0.0, delta = 0.0, r = 0.0;
  std::string out;
  std::uint64_t seed = 0;
};

struct Command {
  CLI::App* sub = nullptr;
  std::string config_path;
  Overrides ov;
  int (*run)(const json&) = nullptr;
};

void add_common_options(CLI::App* sub, Command& cmd) {
  sub->set_help_flag("--help", "print this help message");  // frees -h for the barrier height
  sub->add_option("--config", cmd.config_path, "JSON config file")->check(CLI::ExistingFile);
  sub->add_option("--n", cmd.ov.n, "space dimension");
  sub->add_option("--k", cmd.ov.k, "operator order");
  sub->add_option("--res", cmd.ov.res, "grid resolution (cells per axis)");
  sub->add_option("--h", cmd.ov.h, "barrier height h");
  sub->add_option("--H", cmd.ov.H, "cylinder height H");
  sub->add_option("--delta", cmd.ov.delta, "comparison-function delta");
  sub->add_option("--r", cmd.ov.r, "tube half-width r");
  sub->add_option("--out", cmd.ov.out, "output directory");
  sub->add_option("--seed", cmd.ov.seed, "RNG seed");
}

json merged_config(const Command& cmd) {
  json cfg = cmd.config_path.empty() ? json::object() : load_json_file(cmd.config_path);
  const CLI::App* sub = cmd.sub;
  if (sub->count("--n")) cfg["n"] = cmd.ov.n;
  if (sub->count("--k")) cfg["k"] = cmd.ov.k;
  if (sub->count("--res")) cfg["resolution"] = cmd.ov.res;
  if (sub->count("--h")) cfg["h"] = cmd.ov.h;
  if (sub->count("--H")) cfg["H"] = cmd.ov.H;
  if (sub->count("--delta")) cfg["delta"] = cmd.ov.delta;
  if (sub->count("--r")) cfg["r"] = cmd.ov.r;
  if (sub->count("--out")) cfg["out"] = cmd.ov.out;
  if (sub->count("--seed")) cfg["seed"] = cmd.ov.seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(hessianlab::kToolkitName) + " " + hessianlab::kVersion +
               ": batch runner for the quadratic Hessian toolkit"};
  app.require_subcommand(1);

  std::vector<Command> commands(7);
  const std::pair<const char*, int (*)(const json&)> table[] = {
      {"solve", cmd_solve},         {"audit-flatset", cmd_audit_flatset},
      {"certify", cmd_certify},     {"barriers", cmd_barriers},
      {"pogorelov", cmd_pogorelov}, {"modulus", cmd_modulus},
      {"c2", cmd_c2},
  };
  const char* descriptions[] = {
      "Solve a Dirichlet problem and snapshot the solution",
      "Measure contact-set dimensions against supporting planes",
      "Search for cylinder-barrier witnesses at audit offenders",
      "Check the cylinder barrier and comparison-function identities",
      "Evaluate the weighted Hessian functional and the k >= 3 gallery",
      "Measure the family-wide flatness modulus on solved quadratics",
      "Record origin Hessian norms across a boundary family",
  };
  for (std::size_t i = 0; i < commands.size(); ++i) {
    commands[i].sub = app.add_subcommand(table[i].first, descriptions[i]);
    commands[i].run = table[i].second;
    add_common_options(commands[i].sub, commands[i]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  for (const Command& cmd : commands) {
    if (!app.got_subcommand(cmd.sub)) continue;
    try {
      return cmd.run(merged_config(cmd));
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }
  return 1;
}
