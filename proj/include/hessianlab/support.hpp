#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hessianlab/grid_function.hpp"
#include "hessianlab/lp.hpp"

namespace hessianlab {

/// L(x) = base + slope . (x - x0), touching u at the node x0 from below.
struct SupportingPlane {
  Vec x0;
  double base = 0.0;
  Vec slope;

  double value(const Vec& x) const { return base + slope.dot(x - x0); }
};

class NonConvexityError : public std::runtime_error {
 public:
  NonConvexityError(std::string msg, std::size_t node)
      : std::runtime_error(std::move(msg)), node(node) {}
  std::size_t node;
};

/// Relative tolerance on plane support, scaled by the data oscillation.
inline double support_tolerance(const GridFunction& u) {
  const double o = u.osc();
  return 1e-9 * (o > 0.0 ? o : 1.0);
}

/// Smallest value of u - L over all defined nodes and cut points.
inline double support_gap(const GridFunction& u, const SupportingPlane& plane) {
  const Grid& g = u.grid();
  double gap = 1e300;
  for (std::size_t f = 0; f < g.node_count(); ++f)
    if (u.defined(f)) gap = std::min(gap, u.value(f) - plane.value(g.coord(f)));
  for (std::size_t id = 0; id < g.cut_count(); ++id)
    gap = std::min(gap, u.cut_value(id) - plane.value(g.cut_point(id)));
  return gap;
}

namespace detail {

/// Rows of the support program at x0: slope . (x - x0) <= u(x) - u(x0),
/// one row per defined node or cut point, in the slope variables only.
inline ConstraintRows support_rows(const GridFunction& u, std::size_t node) {
  const Grid& g = u.grid();
  const int n = g.dim();
  const Vec x0 = g.coord(node);
  const double u0 = u.value(node);
  ConstraintRows rows(n);
  rows.reserve(g.node_count());
  std::vector<double> a(static_cast<std::size_t>(n));
  for (std::size_t f = 0; f < g.node_count(); ++f) {
    if (!u.defined(f) || f == node) continue;
    const Vec d = g.coord(f) - x0;
    for (int i = 0; i < n; ++i) a[i] = d[i];
    rows.add(a.data(), u.value(f) - u0);
  }
  for (std::size_t id = 0; id < g.cut_count(); ++id) {
    const Vec d = g.cut_point(id) - x0;
    for (int i = 0; i < n; ++i) a[i] = d[i];
    rows.add(a.data(), u.cut_value(id) - u0);
  }
  return rows;
}

/// Max over rows of (a . p - b); index of the worst row via `worst`.
inline double max_row_violation(const ConstraintRows& rows, const Vec& p, std::size_t* worst = nullptr) {
  double v = 0.0;  // row set always includes the x0 row implicitly: gap 0
  if (worst) *worst = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double* a = rows.row(r);
    double dot = 0.0;
    for (int i = 0; i < p.size(); ++i) dot += a[i] * p[i];
    const double g = dot - rows.rhs(r);
    if (g > v) {
      v = g;
      if (worst) *worst = r;
    }
  }
  return v;
}

/// Maps the r-th support row back to the flat node index it came from.
inline std::size_t support_row_node(const GridFunction& u, std::size_t node, std::size_t row) {
  const Grid& g = u.grid();
  std::size_t r = 0;
  for (std::size_t f = 0; f < g.node_count(); ++f) {
    if (!u.defined(f) || f == node) continue;
    if (r == row) return f;
    ++r;
  }
  return node;  // cut-point rows report the base node itself
}

}  // namespace detail

/// Computes a plane through (x0, u(x0)) lying below u on the whole grid.
///
/// Phase 1 minimizes the worst overshoot s = max_x (L(x) - u(x)); if that
/// minimum exceeds the support tolerance there is no supporting plane and u
/// fails discrete convexity at x0. Phase 2 pins the slope down within the
/// optimal face: each coordinate is pushed to its extremes over the face and
/// set to the midpoint, which lands on the analytic subgradient's center
/// (for smooth u, the gradient) instead of an arbitrary vertex.
inline SupportingPlane supporting_plane(const GridFunction& u, std::size_t node) {
  const Grid& g = u.grid();
  if (!u.defined(node)) throw std::invalid_argument("supporting_plane: undefined base node");
  const int n = g.dim();
  const double osc = u.osc();
  const double tol = support_tolerance(u);
  const double slope_box = 4.0 * (osc > 0.0 ? osc : 1.0) / g.spacing();

  ConstraintRows rows = detail::support_rows(u, node);

  // Phase 1: variables (p, s), minimize s with p.d - s <= du.
  ConstraintRows ext(n + 1);
  ext.reserve(rows.size());
  {
    std::vector<double> a(static_cast<std::size_t>(n) + 1);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const double* src = rows.row(r);
      for (int i = 0; i < n; ++i) a[i] = src[i];
      a[n] = -1.0;
      ext.add(a.data(), rows.rhs(r));
    }
  }
  Vec c = Vec::Zero(n + 1);
  c[n] = 1.0;
  Vec lo = Vec::Constant(n + 1, -slope_box), hi = Vec::Constant(n + 1, slope_box);
  lo[n] = 0.0;
  hi[n] = 2.0 * (osc > 0.0 ? osc : 1.0);
  const LpResult phase1 = solve_lp(ext, c, lo, hi);
  if (!phase1.feasible) throw std::runtime_error("supporting_plane: optimization failed");

  const double s_star = std::max(phase1.value, 0.0);
  if (s_star > tol) {
    std::size_t worst = 0;
    detail::max_row_violation(rows, phase1.z.head(n), &worst);
    throw NonConvexityError(
        "supporting_plane: no plane through the base node stays below the data",
        detail::support_row_node(u, node, worst));
  }

  // Phase 2: within the near-optimal face, center each slope coordinate.
  ConstraintRows face = rows;
  const double tol_inner = 1e-12 * (1.0 + osc);
  for (std::size_t r = 0; r < face.size(); ++r) face.set_rhs(r, face.rhs(r) + s_star + tol_inner);
  Vec plo = Vec::Constant(n, -slope_box), phi = Vec::Constant(n, slope_box);
  Vec mid(n);
  bool face_ok = true;
  for (int i = 0; i < n && face_ok; ++i) {
    Vec ci = Vec::Zero(n);
    ci[i] = 1.0;
    const LpResult lo_i = solve_lp(face, ci, plo, phi, 0x5eed11ab + 2 * i + 1);
    ci[i] = -1.0;
    const LpResult hi_i = solve_lp(face, ci, plo, phi, 0x5eed11ab + 2 * i + 2);
    face_ok = lo_i.feasible && hi_i.feasible;
    if (face_ok) mid[i] = 0.5 * (lo_i.z[i] + hi_i.z[i]);
  }

  SupportingPlane plane;
  plane.x0 = g.coord(node);
  plane.base = u.value(node);
  if (face_ok && detail::max_row_violation(rows, mid) <= 0.9 * tol) {
    plane.slope = mid;
  } else {
    plane.slope = phase1.z.head(n);
  }
  return plane;
}

/// All defined nodes with u < L + delta. Never empty: the base node of a
/// valid plane satisfies u = L there.
inline std::vector<std::size_t> sublevel_flat_set(const GridFunction& u, const SupportingPlane& plane,
                                                  double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("sublevel_flat_set: delta must be positive");
  const Grid& g = u.grid();
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < g.node_count(); ++f)
    if (u.defined(f) && u.value(f) < plane.value(g.coord(f)) + delta) out.push_back(f);
  return out;
}

}  // namespace hessianlab
