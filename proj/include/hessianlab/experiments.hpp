#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "hessianlab/audits.hpp"
#include "hessianlab/dirichlet.hpp"
#include "hessianlab/pogorelov.hpp"
#include "hessianlab/support.hpp"

namespace hessianlab {

// ---------------------------------------------------------------------------
// Universal modulus experiment
// ---------------------------------------------------------------------------

struct ModulusRow {
  std::size_t member = 0;
  double delta = 0.0;
  bool flagged = false;  // flat set never fits an (n-2)-subspace tube
};

struct ModulusTable {
  int n = 0;
  double sup_bound = 0.0;  // K
  double width = 0.0;      // r
  std::vector<ModulusRow> rows;
  double family_min = 0.0;  // min delta over unflagged rows
  std::vector<CertificateSearch> flagged_certificates;  // one per flagged row, in row order
};

/// For each convex family member bounded by K, bisects for the largest delta
/// whose sublevel flat set at the node nearest the origin still fits inside
/// the r-neighborhood of some (n-2)-dimensional affine subspace. A member
/// whose flat set never fits is flagged and handed to the certificate search.
inline ModulusTable modulus_experiment(const std::vector<GridFunction>& family, double sup_bound,
                                       double width) {
  if (family.empty()) throw std::invalid_argument("modulus_experiment: empty family");
  if (!(sup_bound > 0.0) || !(width > 0.0))
    throw std::invalid_argument("modulus_experiment: bounds must be positive");

  ModulusTable table;
  table.n = family.front().grid().dim();
  table.sup_bound = sup_bound;
  table.width = width;
  table.family_min = 0.0;
  bool any_unflagged = false;

  for (std::size_t m = 0; m < family.size(); ++m) {
    const GridFunction& u = family[m];
    const Grid& g = u.grid();
    if (g.dim() != table.n)
      throw std::invalid_argument("modulus_experiment: mixed dimensions in family");
    double sup = 0.0;
    for (std::size_t f = 0; f < g.node_count(); ++f)
      if (u.defined(f)) sup = std::max(sup, std::abs(u.value(f)));
    for (std::size_t id = 0; id < g.cut_count(); ++id)
      sup = std::max(sup, std::abs(u.cut_value(id)));
    if (sup > sup_bound * (1.0 + 1e-12))
      throw std::invalid_argument("modulus_experiment: member " + std::to_string(m) +
                                  " exceeds the sup-norm bound");

    const std::size_t x0 = g.nearest_node(Vec::Zero(table.n));
    const SupportingPlane plane = supporting_plane(u, x0);
    const double osc = u.osc();
    const double floor = osc > 0.0 ? 1e-12 * osc : 1e-15;

    Eigen::MatrixXd last_axes;
    const auto fits = [&](double delta) {
      const std::vector<std::size_t> flat = sublevel_flat_set(u, plane, delta);
      std::vector<Vec> pts;
      pts.reserve(flat.size());
      for (std::size_t f : flat) pts.push_back(g.coord(f));
      const AffineFitReport fit = affine_fit(pts, g.coord(x0));
      last_axes = fit.axes;
      return fit.widths[static_cast<std::size_t>(table.n) - 2] <= width;
    };

    if (!fits(floor)) {
      table.rows.push_back({m, 0.0, true});
      table.flagged_certificates.push_back(theorem1_certificate(u, plane, last_axes));
      continue;
    }
    double delta;
    if (osc > 0.0 && fits(osc)) {
      delta = osc;  // capped: the whole graph already fits
    } else {
      double lo = floor, hi = osc;
      for (int it = 0; it < 48; ++it) {
        const double mid = 0.5 * (lo + hi);
        (fits(mid) ? lo : hi) = mid;
      }
      delta = lo;
    }
    table.rows.push_back({m, delta, false});
    table.family_min = any_unflagged ? std::min(table.family_min, delta) : delta;
    any_unflagged = true;
  }
  return table;
}

// ---------------------------------------------------------------------------
// Interior second-derivative experiment
// ---------------------------------------------------------------------------

struct C2Row {
  double sup_norm = 0.0;      // max |u| over the solved grid
  double hessian_norm = 0.0;  // spectral norm of the discrete Hessian nearest the origin
};

/// Solves the unit-ball problem with unit right-hand side for each boundary
/// datum and records (sup norm, Hessian norm at the node nearest the origin).
inline std::vector<C2Row> c2_at_origin_experiment(const std::vector<FieldPtr>& boundary_family,
                                                  int n, int resolution,
                                                  const SolveOptions& opt = {}) {
  if (boundary_family.empty())
    throw std::invalid_argument("c2_at_origin_experiment: empty family");
  std::vector<C2Row> rows;
  rows.reserve(boundary_family.size());
  for (const FieldPtr& gdata : boundary_family) {
    DirichletProblem p;
    p.n = n;
    p.k = 2;
    p.domain = Domain{DomainKind::kBall, 1.0};
    p.rhs = std::make_shared<const CallableField>(n, [](const Vec&) { return 1.0; });
    p.boundary = gdata;
    const auto [u, report] = solve_dirichlet(p, resolution, opt);
    const Grid& g = u.grid();
    C2Row row;
    for (std::size_t f = 0; f < g.node_count(); ++f)
      if (u.defined(f)) row.sup_norm = std::max(row.sup_norm, std::abs(u.value(f)));
    for (std::size_t id = 0; id < g.cut_count(); ++id)
      row.sup_norm = std::max(row.sup_norm, std::abs(u.cut_value(id)));
    row.hessian_norm = spectral_norm(discrete_hessian(u, g.nearest_node(Vec::Zero(n))));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace hessianlab
