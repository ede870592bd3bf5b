// Acceptance gate: one line per criterion, PASS/FAIL, exit 0 only if all
// pass. Tolerances are pinned here, next to the checks they govern. Oracles
// are the test-side implementations (eigenvalue paths, direct evaluation),
// never the library code under test.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hessianlab/audits.hpp"
#include "hessianlab/barriers.hpp"
#include "hessianlab/dirichlet.hpp"
#include "hessianlab/experiments.hpp"
#include "hessianlab/families.hpp"
#include "hessianlab/gallery.hpp"
#include "hessianlab/pogorelov.hpp"
#include "hessianlab/sigma.hpp"

#include "../support/oracles.hpp"

using hessianlab::Vec;

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point start = clock::now();
  return std::chrono::duration<double>(clock::now() - start).count();
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

hessianlab::GridPtr box_grid(int n, int res) {
  return std::make_shared<const hessianlab::Grid>(
      n, hessianlab::Domain{hessianlab::DomainKind::kBox, 1.0}, res);
}

hessianlab::FieldPtr constant_field(int n, double v) {
  return std::make_shared<const hessianlab::CallableField>(n, [v](const Vec&) { return v; });
}

// --- 1: elementary symmetric values, minor enumeration vs eigenvalues ------

bool criterion_sigma_oracle(std::string& detail) {
  const double t0 = now_seconds();
  std::mt19937_64 rng(20260816u);
  double worst = 0.0;
  for (int n = 2; n <= 5; ++n)
    for (int k = 1; k <= n; ++k)
      for (int trial = 0; trial < 1000; ++trial) {
        const auto m = oracles::random_symmetric(rng, n);
        const double minors = hessianlab::sigma_k(m, k);
        const double eigen = oracles::sigma_via_characteristic_poly(m, k);
        worst = std::max(worst, rel_err(minors, eigen));
      }
  const double elapsed = now_seconds() - t0;
  detail = fmt("max rel err %.2e over 14000 matrices, %.1f s", worst, elapsed);
  return worst <= 1e-9 && elapsed < 10.0;
}

// --- 2: cylinder barrier identity ------------------------------------------

bool criterion_barrier_identity(std::string& detail) {
  std::mt19937_64 rng(20260816u);
  std::uniform_real_distribution<double> pick_h(1e-3, 0.5), pick_H(0.05, 2.0);
  double worst = 0.0;
  bool small_h_ok = true;
  for (int n = 2; n <= 6; ++n)
    for (int trial = 0; trial < 100; ++trial) {
      const double h = pick_h(rng), H = pick_H(rng);
      const auto barrier = hessianlab::make_cylinder_barrier(h, H, n);
      const double computed = hessianlab::sigma_k(barrier.hessian(), 2);
      const double closed = 2.0 * (n - 1) * (n - 2) * h * h + 16.0 * (n - 1) * h * h / (H * H);
      worst = std::max(worst, rel_err(computed, closed));
      const double ceiling = hessianlab::h_star(n, H);
      for (const double hh : {0.5 * ceiling, ceiling})
        small_h_ok = small_h_ok && hessianlab::barrier_sigma2_value(hh, H, n) < 1.0;
    }
  detail = fmt("max rel err %.2e over 500 (h, H) draws", worst);
  if (!small_h_ok) detail += ", small-h bound violated";
  return worst <= 1e-12 && small_h_ok;
}

// --- 3: comparison function cone membership ---------------------------------

bool criterion_wdelta_cone(std::string& detail) {
  std::mt19937_64 rng(20260816u);
  std::uniform_real_distribution<double> pick_delta(1e-6, 10.0);
  double worst = 0.0;
  bool cone_ok = true;
  for (int n = 3; n <= 8; ++n)
    for (int trial = 0; trial < 100; ++trial) {
      const double delta = pick_delta(rng);
      const auto w = hessianlab::make_wdelta(delta, n);
      cone_ok = cone_ok && hessianlab::cone_membership(w.hessian(), 2, hessianlab::ConeMode::kClosed)
                               .holds(hessianlab::ConeMode::kClosed);
      const double closed = 2.0 * delta * delta * (n - 2) * (n - 3);
      const double oracle = oracles::sigma_via_characteristic_poly(w.hessian(), 2);
      worst = std::max(worst, rel_err(closed, oracle));
    }
  detail = fmt("max rel err %.2e over 600 deltas", worst);
  if (!cone_ok) detail += ", closed-cone membership violated";
  return worst <= 1e-9 && cone_ok;
}

// --- 4: solver exactness on the radial quadratic ----------------------------

bool criterion_solver_exact(std::string& detail) {
  const double t0 = now_seconds();
  double worst = 0.0;
  for (const int n : {2, 3}) {
    const double alpha = std::sqrt(2.0 / (n * (n - 1.0)));
    for (const int res : {16, 32, 64}) {
      hessianlab::DirichletProblem p;
      p.n = n;
      p.k = 2;
      p.rhs = constant_field(n, 1.0);
      p.boundary = std::make_shared<const hessianlab::QuadraticForm>(
          hessianlab::SymmetricMatrix::identity(n).scaled(alpha), Vec::Zero(n), 0.0);
      const auto [u, rep] = hessianlab::solve_dirichlet(p, res);
      worst = std::max(worst, rep.residual);
      (void)u;
    }
  }
  const double elapsed = now_seconds() - t0;
  detail = fmt("max residual %.2e, %.1f s", worst, elapsed);
  return worst <= 1e-9 && elapsed < 60.0;
}

// --- 5: manufactured-solution convergence order -----------------------------

bool criterion_convergence_order(std::string& detail) {
  const int n = 2;
  const auto exact = [](const Vec& x) {
    const double r2 = x.squaredNorm();
    return 0.5 * r2 + 0.25 * r2 * r2;
  };
  std::vector<double> errs;
  for (const int res : {16, 32, 64}) {
    hessianlab::DirichletProblem p;
    p.n = n;
    p.k = 2;
    p.rhs = std::make_shared<const hessianlab::CallableField>(n, [](const Vec& x) {
      const double r2 = x.squaredNorm();
      return (1.0 + r2) * (1.0 + 3.0 * r2);  // det of (1+r^2) I + 2 x x^T
    });
    p.boundary = std::make_shared<const hessianlab::CallableField>(n, exact);
    const auto [u, rep] = hessianlab::solve_dirichlet(p, res);
    (void)rep;
    const auto& g = u.grid();
    double sup = 0.0;
    for (std::size_t f = 0; f < g.node_count(); ++f)
      if (u.defined(f)) sup = std::max(sup, std::abs(u.value(f) - exact(g.coord(f))));
    errs.push_back(sup);
  }
  const double order1 = std::log2(errs[0] / errs[1]);
  const double order2 = std::log2(errs[1] / errs[2]);
  detail = fmt("orders %.2f (16-32), %.2f (32-64)", order1, order2);
  return order1 >= 1.7 && order2 >= 1.7;
}

// --- 6: flat-set dimensions and contradiction certificates ------------------

// Recomputes every margin from the certificate's raw fields by direct
// evaluation; shares no code with the search.
bool margins_check_out(const hessianlab::GridFunction& u, const hessianlab::SupportingPlane& plane,
                       const hessianlab::Certificate& cert) {
  const Vec nu = cert.frame.col(2);
  const auto w_at = [&](const Vec& y) {
    const auto val = u.interpolate(cert.base_point + y);
    if (!val) return 1e300;
    return *val - plane.value(cert.base_point + y) - cert.slope * y.dot(nu);
  };
  const auto profile = [&](const Vec& y) {
    const double yn = y.dot(nu);
    const double flat2 = y.squaredNorm() - yn * yn;
    return (cert.h / (cert.rho * cert.rho)) * flat2 +
           (4.0 * cert.h / (cert.height * cert.height)) * (yn - 0.5 * cert.height) *
               (yn - 0.5 * cert.height);
  };
  double boundary_min = 1e300;
  for (int j = 0; j < 16; ++j) {
    const double t = 2.0 * M_PI * j / 16;
    const Vec d = std::cos(t) * cert.frame.col(0) + std::sin(t) * cert.frame.col(1);
    for (int i = 0; i <= 8; ++i) {
      const Vec y = cert.rho * d + (cert.height * i / 8.0) * nu;
      boundary_min = std::min(boundary_min, profile(y) - w_at(y));
    }
    for (int i = 0; i <= 4; ++i) {
      const Vec base = (cert.rho * i / 4.0) * d;
      boundary_min = std::min(boundary_min, profile(base) - w_at(base));
      boundary_min =
          std::min(boundary_min, profile(base + cert.height * nu) - w_at(base + cert.height * nu));
    }
  }
  const double center = w_at(0.5 * cert.height * nu);
  const double ellipticity =
      1.0 - oracles::sigma_via_characteristic_poly(cert.barrier.hessian(), 2);
  const bool agree = std::abs(boundary_min - cert.margin_boundary) <= 1e-12 &&
                     std::abs(center - cert.margin_center) <= 1e-12 &&
                     std::abs(ellipticity - cert.margin_ellipticity) <= 1e-10;
  return agree && boundary_min > 0.0 && center > 0.0 && ellipticity > 0.0;
}

bool criterion_flatset_and_certificates(std::string& detail) {
  // Exactly flat cylinder data passes with dimension n - 2.
  for (const auto& [n, res] : {std::pair{3, 32}, std::pair{4, 16}}) {
    const auto g = box_grid(n, res);
    const hessianlab::CallableField cyl(
        n, [](const Vec& x) { return x[0] * x[0] + x[1] * x[1]; });
    const auto u = hessianlab::sample_field(g, cyl);
    const auto audit = hessianlab::strict_2convexity_audit(u, {g->nearest_node(Vec::Zero(n))});
    if (!audit.passed) {
      detail = fmt("cylinder data failed the audit at n = %.0f", double(n));
      return false;
    }
    for (const auto& scan : audit.scans)
      if (scan.dimension != n - 2) {
        detail = fmt("cylinder dimension %.0f at n = %.0f", double(scan.dimension), double(n));
        return false;
      }
  }

  // The two canonical violators produce certificates with positive margins.
  const char* names[] = {"ridge", "kink"};
  const std::function<double(const Vec&)> violators[] = {
      [](const Vec& x) { return x[2] * x[2]; },
      [](const Vec& x) { return std::abs(x[2]); },
  };
  for (int v = 0; v < 2; ++v) {
    const auto g = box_grid(3, 32);
    const hessianlab::CallableField f(3, violators[v]);
    const auto u = hessianlab::sample_field(g, f);
    const auto audit = hessianlab::strict_2convexity_audit(u, {g->nearest_node(Vec::Zero(3))});
    if (audit.passed || audit.offenders.empty()) {
      detail = std::string(names[v]) + " data passed the audit";
      return false;
    }
    const auto& off = audit.offenders[0];
    const auto search = hessianlab::theorem1_certificate(u, off.plane, off.frame);
    if (!search.found()) {
      detail = std::string("no certificate for the ") + names[v];
      return false;
    }
    if (!margins_check_out(u, off.plane, *search.certificate)) {
      detail = std::string("recomputed margins disagree or are nonpositive for the ") + names[v];
      return false;
    }
  }
  detail = "cylinder dims exact, both violators certified, margins recomputed positive";
  return true;
}

// --- 7: weighted Hessian functional stability under refinement --------------

bool criterion_pogorelov_stability(std::string& detail) {
  using hessianlab::QuadraticForm;
  using hessianlab::SymmetricMatrix;
  const int n = 2;

  SymmetricMatrix identity2 = SymmetricMatrix::identity(n);
  SymmetricMatrix stretched(n);
  stretched.set(0, 0, 2.0);
  stretched.set(1, 1, 0.5);

  struct Instance {
    QuadraticForm boundary;
    QuadraticForm w;
  };
  const Instance instances[] = {
      {QuadraticForm(identity2, Vec::Zero(n), 0.0), QuadraticForm(identity2, Vec::Zero(n), 0.2)},
      {QuadraticForm(stretched, Vec::Zero(n), 0.0),
       QuadraticForm(identity2.scaled(0.4), Vec::Zero(n), 0.25)},
  };

  double worst_change = 0.0;
  for (const auto& inst : instances) {
    double values[2];
    int slot = 0;
    for (const int res : {32, 64}) {
      hessianlab::DirichletProblem p;
      p.n = n;
      p.k = 2;
      p.rhs = constant_field(n, 1.0);
      p.boundary = std::make_shared<const QuadraticForm>(inst.boundary);
      const auto [u, rep] = hessianlab::solve_dirichlet(p, res);
      (void)rep;
      const auto region = hessianlab::origin_component(u, inst.w);
      if (region.empty()) {
        detail = "origin component empty";
        return false;
      }
      values[slot++] = hessianlab::pogorelov_functional(u, inst.w, region);
    }
    worst_change = std::max(worst_change, std::abs(values[1] - values[0]) /
                                              std::max(std::abs(values[1]), 1e-300));
  }
  detail = fmt("worst relative change %.2e between the two grids", worst_change);
  return worst_change <= 0.10;
}

// --- 8: family flatness modulus, positive and reproducible -------------------

bool criterion_modulus(std::string& detail) {
  const int n = 3, res = 16;
  const std::uint64_t seed = 424242u;
  const double sup_bound = 4.0, width = 0.1;

  const auto measure = [&] {
    const auto family = hessianlab::unit_sigma2_quadratics(n, 10, seed);
    const auto solved = hessianlab::solve_quadratic_family(family, n, res);
    return hessianlab::modulus_experiment(solved, sup_bound, width);
  };
  const auto first = measure();
  const auto second = measure();

  if (!(first.family_min > 0.0)) {
    detail = fmt("family modulus %.3e not positive", first.family_min);
    return false;
  }
  bool identical = first.rows.size() == second.rows.size();
  for (std::size_t i = 0; identical && i < first.rows.size(); ++i)
    identical = first.rows[i].delta == second.rows[i].delta &&
                first.rows[i].flagged == second.rows[i].flagged;
  detail = fmt("family modulus %.4e over 10 members", first.family_min);
  detail += identical ? ", rerun bit-identical" : ", rerun DIFFERS";
  return identical;
}

// --- 9: origin curvature reproduction and trace stability -------------------

bool criterion_c2(std::string& detail) {
  const int n = 3;
  const double alpha = std::sqrt(2.0 / (n * (n - 1.0)));  // 1/sqrt(3)

  std::vector<hessianlab::FieldPtr> quadratics;
  for (const double scale : {alpha, 1.0})
    quadratics.push_back(std::make_shared<const hessianlab::QuadraticForm>(
        hessianlab::SymmetricMatrix::identity(n).scaled(scale), Vec::Zero(n), 0.0));
  const auto rows = hessianlab::c2_at_origin_experiment(quadratics, n, 16);
  double worst = 0.0;
  for (const auto& row : rows) worst = std::max(worst, std::abs(row.hessian_norm - alpha));
  if (worst > 1e-6) {
    detail = fmt("origin Hessian norm off by %.2e", worst);
    return false;
  }

  // Sharp-example trace: finite and refinement-stable.
  const hessianlab::FieldPtr trace = std::make_shared<const hessianlab::CallableField>(
      n, [](const Vec& x) { return x[0] * x[0] + x[1] * x[1]; });
  double h[2];
  int slot = 0;
  for (const int res : {16, 32})
    h[slot++] = hessianlab::c2_at_origin_experiment({trace}, n, res)[0].hessian_norm;
  const double change = std::abs(h[1] - h[0]) / std::max(std::abs(h[1]), 1e-300);
  detail = fmt("norm error %.1e, trace value %.4f, refinement change %.1f%%", worst, h[1],
               100.0 * change);
  return std::isfinite(h[0]) && std::isfinite(h[1]) && change <= 0.10;
}

// --- 10: gallery candidate, unbounded Hessian with bracketed sigma ----------

bool criterion_gallery(std::string& detail) {
  const auto cand = hessianlab::pogorelov_gallery(3, 4);
  const double axial = 0.1;  // inside the convexity window
  const auto at = [&](double r) {
    Vec x = Vec::Zero(4);
    x[0] = r;
    x[3] = axial;
    return cand.hessian(x);
  };
  const double norm_far = hessianlab::spectral_norm(at(1e-1));
  const double norm_near = hessianlab::spectral_norm(at(1e-3));
  const double growth = norm_near / norm_far;

  // Annulus sweep 0.01 <= |x'| <= 1 inside the convexity window; the bracket
  // is the recorded one from the unit suite.
  const double tw = 0.95 * cand.convex_axial_halfwidth();
  double s_min = 1e300, s_max = 0.0;
  for (int ri = 0; ri <= 40; ++ri) {
    const double r = 0.01 * std::pow(100.0, ri / 40.0);
    for (int ti = -8; ti <= 8; ++ti) {
      Vec x = Vec::Zero(4);
      x[0] = r;
      x[3] = tw * ti / 8.0;
      const double s = oracles::sigma_via_characteristic_poly(cand.hessian(x), 3);
      s_min = std::min(s_min, s);
      s_max = std::max(s_max, s);
    }
  }
  detail = fmt("Hessian growth %.1fx, annulus sigma_3 in [%.2f, %.0f]", growth, s_min, s_max);
  return growth >= 10.0 && s_min >= 1.0 && s_max <= 2e4;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    bool (*run)(std::string&);
  };
  const Criterion criteria[] = {
      {"operator value agrees across minor and eigenvalue paths", criterion_sigma_oracle},
      {"cylinder barrier matches its closed form", criterion_barrier_identity},
      {"comparison function stays in the closed cone", criterion_wdelta_cone},
      {"solver reproduces the radial quadratic", criterion_solver_exact},
      {"manufactured solution converges at order >= 1.7", criterion_convergence_order},
      {"flat-set dims exact; violators certified with recomputed margins",
       criterion_flatset_and_certificates},
      {"weighted Hessian functional stable under refinement", criterion_pogorelov_stability},
      {"family flatness modulus positive and reproducible", criterion_modulus},
      {"origin curvature reproduced; trace refinement-stable", criterion_c2},
      {"gallery Hessian blows up while sigma_3 stays bracketed", criterion_gallery},
  };

  int failures = 0;
  for (std::size_t i = 0; i < sizeof criteria / sizeof criteria[0]; ++i) {
    std::string detail;
    bool ok = false;
    try {
      ok = criteria[i].run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    failures += ok ? 0 : 1;
    std::printf("%s  %2zu. %s (%s)\n", ok ? "PASS" : "FAIL", i + 1, criteria[i].name,
                detail.c_str());
    std::fflush(stdout);
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
