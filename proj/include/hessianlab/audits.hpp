#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hessianlab/affine_fit.hpp"
#include "hessianlab/quadratic_form.hpp"
#include "hessianlab/sigma.hpp"
#include "hessianlab/support.hpp"

namespace hessianlab {

// ---------------------------------------------------------------------------
// Flat-set dimension audit
// ---------------------------------------------------------------------------

/// One (sample node, delta) measurement of the contact set.
struct FlatSetScan {
  std::size_t node = 0;
  double delta = 0.0;        // absolute sublevel offset
  double threshold = 0.0;    // width threshold used for the dimension call
  std::size_t set_size = 0;
  AffineFitReport fit;
  int dimension = 0;         // smallest d with widths[d] <= threshold
};

struct ConvexityAuditReport {
  bool passed = false;
  std::vector<FlatSetScan> scans;  // three deltas per sample node

  struct Offender {
    std::size_t node = 0;
    SupportingPlane plane;
    Eigen::MatrixXd frame;  // fit axes at the smallest delta; last column = normal candidate
    int dimension = 0;
  };
  std::vector<Offender> offenders;
};

namespace detail {

// Width threshold for calling a point set d-dimensional: lattice rounding
// contributes up to two spacings, and a sublevel at depth delta spreads the
// contact set by about sqrt(delta) even for a strictly convex function.
inline double dimension_threshold(double spacing, double delta) {
  return std::max(2.0 * spacing, std::sqrt(delta));
}

}  // namespace detail

/// Flat-set dimension audit: at each sample node, takes the supporting
/// plane, measures sublevel sets at three shrinking depths, and fits affine
/// subspaces. Passes when the smallest-depth dimension estimate is at most
/// n - 2 everywhere; offenders carry the frame a certificate search needs.
inline ConvexityAuditReport strict_2convexity_audit(const GridFunction& u,
                                                    const std::vector<std::size_t>& samples) {
  if (samples.empty()) throw std::invalid_argument("strict_2convexity_audit: no sample nodes");
  const Grid& g = u.grid();
  const int n = g.dim();
  const double osc = u.osc();
  if (!(osc > 0.0)) throw std::invalid_argument("strict_2convexity_audit: constant grid function");

  ConvexityAuditReport report;
  report.passed = true;
  for (std::size_t node : samples) {
    const SupportingPlane plane = supporting_plane(u, node);
    const Vec anchor = g.coord(node);
    int last_dimension = 0;
    Eigen::MatrixXd last_axes;
    for (double rel : {1e-2, 1e-3, 1e-4}) {
      FlatSetScan scan;
      scan.node = node;
      scan.delta = rel * osc;
      scan.threshold = detail::dimension_threshold(g.spacing(), scan.delta);
      const std::vector<std::size_t> flat = sublevel_flat_set(u, plane, scan.delta);
      scan.set_size = flat.size();
      std::vector<Vec> pts;
      pts.reserve(flat.size());
      for (std::size_t f : flat) pts.push_back(g.coord(f));
      scan.fit = affine_fit(pts, anchor);
      scan.dimension = scan.fit.smallest_dimension(scan.threshold);
      last_dimension = scan.dimension;
      last_axes = scan.fit.axes;
      report.scans.push_back(std::move(scan));
    }
    if (last_dimension > n - 2) {
      report.passed = false;
      report.offenders.push_back({node, plane, last_axes, last_dimension});
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Contradiction certificates
// ---------------------------------------------------------------------------

/// Witness that a grid function cannot satisfy sigma_2(D^2 u) >= 1 in the
/// viscosity sense: a cylinder-profile quadratic that dominates u on the
/// sampled cylinder boundary, loses to u at the cylinder center, and has
/// sigma_2 below 1. Margins are the three strict inequalities.
struct Certificate {
  Vec base_point;
  Eigen::MatrixXd frame;     // columns: n-1 flat directions, then the normal used
  double slope = 0.0;        // coefficient of the subtracted ray-supporting term
  double h = 0.0, height = 0.0, rho = 0.0;
  QuadraticForm barrier;     // pure cylinder profile in global coordinates
  QuadraticForm touching;    // barrier + plane + slope + vertical shift
  std::size_t touch_node = 0;
  double touch_radius = 0.0;  // neighborhood radius on which `touching` dominates u
  double margin_boundary = 0.0;     // min over sampled cylinder boundary of (P - v)
  double margin_center = 0.0;       // v at the cylinder center
  double margin_ellipticity = 0.0;  // 1 - sigma_2(D^2 P)
};

struct CertificateSearch {
  std::optional<Certificate> certificate;
  struct Row {
    double height = 0.0, slope = 0.0;
    double margin_boundary = 0.0, margin_center = 0.0, margin_ellipticity = 0.0;
  };
  std::vector<Row> landscape;  // every attempted (H, slope), margins as found

  bool found() const { return certificate.has_value(); }
};

namespace detail {

// Sample directions on the unit sphere of the flat subspace (n-1 = 1, 2, 3).
inline std::vector<Vec> flat_directions(const Eigen::MatrixXd& frame) {
  const int n = static_cast<int>(frame.rows());
  std::vector<Vec> dirs;
  if (n == 2) {
    dirs.push_back(frame.col(0));
    dirs.push_back(-frame.col(0));
    return dirs;
  }
  if (n == 3) {
    for (int j = 0; j < 16; ++j) {
      const double t = 2.0 * M_PI * j / 16;
      dirs.push_back(std::cos(t) * frame.col(0) + std::sin(t) * frame.col(1));
    }
    return dirs;
  }
  for (int j = 0; j < 32; ++j) {  // Fibonacci points on the 2-sphere of the flat 3-space
    const double z = 1.0 - 2.0 * (j + 0.5) / 32;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double t = M_PI * (1.0 + std::sqrt(5.0)) * j;
    dirs.push_back(r * std::cos(t) * frame.col(0) + r * std::sin(t) * frame.col(1) +
                   z * frame.col(2));
  }
  return dirs;
}

inline double boundary_distance(const Grid& g, const Vec& x) {
  if (g.domain().kind == DomainKind::kBall) return g.domain().radius - x.norm();
  double d = 1e300;
  for (int i = 0; i < x.size(); ++i) d = std::min(d, g.domain().radius - std::abs(x[i]));
  return d;
}

}  // namespace detail

/// Searches for a contradiction certificate at the plane's base point along
/// the frame's last column (both orientations). Heights run over a dyadic
/// ladder of the domain height; the slope candidates back off from the
/// one-sided ray-supporting slope, which a lattice can only overestimate.
/// Emits the first certificate whose three margins are all positive, else
/// the margin landscape.
inline CertificateSearch theorem1_certificate(const GridFunction& u, const SupportingPlane& plane,
                                              const Eigen::MatrixXd& frame) {
  const Grid& g = u.grid();
  const int n = g.dim();
  if (frame.rows() != n || frame.cols() != n)
    throw std::invalid_argument("theorem1_certificate: frame must be n x n");
  if ((frame.transpose() * frame - Eigen::MatrixXd::Identity(n, n)).norm() > 1e-8)
    throw std::invalid_argument("theorem1_certificate: frame is not orthonormal");

  CertificateSearch out;
  const Vec x0 = plane.x0;
  const double dx = g.spacing();
  const double room = detail::boundary_distance(g, x0) - 2.0 * dx;
  if (room <= 4.0 * dx) return out;  // no space to stand a cylinder
  const double rho = 0.7 * room;
  const double domain_height = 2.0 * g.domain().radius;

  const std::vector<Vec> dirs = detail::flat_directions(frame);
  const auto v_at = [&](const Vec& y) -> std::optional<double> {
    const std::optional<double> val = u.interpolate(x0 + y);
    if (!val) return std::nullopt;
    return *val - plane.value(x0 + y);
  };

  for (int sign : {+1, -1}) {
    const Vec nu = sign * frame.col(n - 1);

    // One-sided supporting slope of v along the +nu ray.
    double a = 1e300;
    for (int j = 1; j <= 3; ++j) {
      const double t = j * dx;
      if (t > room) break;
      const std::optional<double> v = v_at(t * nu);
      if (v) a = std::min(a, *v / t);
    }
    if (a == 1e300) continue;
    a = std::max(0.0, a);

    std::vector<double> slopes = {a * (1.0 - 1e-3), 0.75 * a, 0.5 * a, 0.25 * a, 0.0, a};
    if (a == 0.0) slopes = {0.0};

    for (int m = 0; m <= 12; ++m) {
      const double H = domain_height * std::ldexp(1.0, -m);
      if (H > 0.7 * room) continue;  // cylinder would poke past the boundary
      for (double slope : slopes) {
        // Sampled cylinder boundary: lateral shell plus both caps.
        std::vector<std::pair<Vec, double>> boundary;  // (offset y, w(y))
        bool hole = false;
        const auto push = [&](const Vec& y) {
          const std::optional<double> v = v_at(y);
          if (!v)
            hole = true;
          else
            boundary.emplace_back(y, *v - slope * y.dot(nu));
        };
        for (const Vec& d : dirs)
          for (int j = 0; j <= 8 && !hole; ++j) push(rho * d + (H * j / 8.0) * nu);
        for (const Vec& d : dirs)
          for (int j = 0; j <= 4 && !hole; ++j) {
            push((rho * j / 4.0) * d);
            push((rho * j / 4.0) * d + H * nu);
          }
        if (hole) continue;

        double wmax = 0.0;
        for (const auto& [y, w] : boundary) wmax = std::max(wmax, w);
        if (!(wmax > 0.0)) continue;
        const double h = (1.0 + 1e-6) * wmax;

        // Cylinder-profile quadratic P(y) = (h/rho^2)|y'|^2 + (4h/H^2)(y.nu - H/2)^2.
        SymmetricMatrix hess(n);
        {
          Eigen::MatrixXd A = (8.0 * h / (H * H)) * (nu * nu.transpose());
          for (int c = 0; c < n - 1; ++c)
            A += (2.0 * h / (rho * rho)) * (frame.col(c) * frame.col(c).transpose());
          for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) hess.set(i, j, A(i, j));
        }
        const auto profile = [&](const Vec& y) {
          const double yn = y.dot(nu);
          const double flat2 = y.squaredNorm() - yn * yn;
          return (h / (rho * rho)) * flat2 + (4.0 * h / (H * H)) * (yn - 0.5 * H) * (yn - 0.5 * H);
        };

        CertificateSearch::Row row;
        row.height = H;
        row.slope = slope;
        row.margin_boundary = 1e300;
        for (const auto& [y, w] : boundary)
          row.margin_boundary = std::min(row.margin_boundary, profile(y) - w);
        const std::optional<double> vc = v_at(0.5 * H * nu);
        row.margin_center = vc ? *vc - slope * 0.5 * H : -1e300;
        row.margin_ellipticity = 1.0 - sigma_k(hess, 2);
        out.landscape.push_back(row);

        if (!(row.margin_boundary > 0.0 && row.margin_center > 0.0 &&
              row.margin_ellipticity > 0.0))
          continue;
        if (!cone_membership(hess, 2, ConeMode::kOpen).in_open_cone) continue;

        QuadraticForm barrier = QuadraticForm::centered(x0, hess, -(4.0 * h / H) * nu, h);

        // Vertical shift: touch at the grid node inside the cylinder where
        // (u - barrier - plane - slope term) is largest.
        double shift = -1e300;
        std::size_t touch = 0;
        for (std::size_t f : g.interior_nodes()) {
          const Vec y = g.coord(f) - x0;
          const double yn = y.dot(nu);
          if (yn < 0.0 || yn > H) continue;
          if (y.squaredNorm() - yn * yn > rho * rho) continue;
          const double excess =
              u.value(f) - (barrier.value(g.coord(f)) + plane.value(g.coord(f)) + slope * yn);
          if (excess > shift) {
            shift = excess;
            touch = f;
          }
        }
        if (shift == -1e300) continue;  // cylinder holds no grid node

        Vec b = barrier.linear() + plane.slope + slope * nu;
        const double c = barrier.constant() + plane.base - plane.slope.dot(x0) -
                         slope * nu.dot(x0) + shift;
        QuadraticForm touching(hess, std::move(b), c);

        double touch_radius = 0.0;
        {
          const Vec yt = g.coord(touch) - x0;
          const double yn = yt.dot(nu);
          const double flat = std::sqrt(std::max(0.0, yt.squaredNorm() - yn * yn));
          touch_radius = std::max(0.0, 0.95 * std::min({rho - flat, yn, H - yn}));
        }

        Eigen::MatrixXd used_frame = frame;
        used_frame.col(n - 1) = nu;
        out.certificate = Certificate{x0,
                                      std::move(used_frame),
                                      slope,
                                      h,
                                      H,
                                      rho,
                                      std::move(barrier),
                                      std::move(touching),
                                      touch,
                                      touch_radius,
                                      row.margin_boundary,
                                      row.margin_center,
                                      row.margin_ellipticity};
        return out;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Viscosity touch test
// ---------------------------------------------------------------------------

enum class TouchSense { kAbove, kBelow };

struct TouchCheck {
  bool order_k_convex = false;
  bool touching = false;
  bool applicable = false;  // both of the above
  double equality_gap = 0.0;
  double worst_gap = 0.0;  // min over the neighborhood of (phi - u), sign-adjusted
  double sigma_value = 0.0;
  double f_value = 0.0;
  bool inequality_holds = false;  // meaningful only when applicable
};

/// Checks the viscosity inequality at a touching point: for a k-convex
/// quadratic phi touching u from above (below) at node x0, sigma_k(D^2 phi)
/// must be >= (<=) f(x0). A phi outside the closed cone, or one that does
/// not actually touch, makes the test vacuous, reported as inapplicable.
inline TouchCheck viscosity_touch_test(const GridFunction& u, const QuadraticForm& phi,
                                       std::size_t x0, TouchSense sense, double f_at_x0 = 1.0,
                                       int k = 2, double radius = 0.0) {
  const Grid& g = u.grid();
  if (phi.dim() != g.dim()) throw std::invalid_argument("viscosity_touch_test: dimension mismatch");
  if (!u.defined(x0)) throw std::invalid_argument("viscosity_touch_test: undefined base node");
  if (radius <= 0.0) radius = 4.0 * g.spacing();
  const double o = u.osc();
  const double tol_touch = 1e-9 * (o > 0.0 ? o : 1.0);

  TouchCheck check;
  check.f_value = f_at_x0;
  check.order_k_convex = cone_membership(phi.hessian(), k, ConeMode::kClosed).in_closure;
  check.sigma_value = sigma_k(phi.hessian(), k);

  const Vec base = g.coord(x0);
  check.equality_gap = std::abs(phi.value(base) - u.value(x0));
  check.worst_gap = 1e300;
  for (std::size_t f = 0; f < g.node_count(); ++f) {
    if (!u.defined(f)) continue;
    const Vec x = g.coord(f);
    if ((x - base).norm() > radius) continue;
    const double gap = phi.value(x) - u.value(f);
    check.worst_gap = std::min(check.worst_gap, sense == TouchSense::kAbove ? gap : -gap);
  }
  check.touching = check.worst_gap >= -tol_touch && check.equality_gap <= tol_touch;
  check.applicable = check.order_k_convex && check.touching;
  check.inequality_holds = sense == TouchSense::kAbove ? check.sigma_value >= f_at_x0 - 1e-12
                                                       : check.sigma_value <= f_at_x0 + 1e-12;
  return check;
}

}  // namespace hessianlab
