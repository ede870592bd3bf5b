#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "hessianlab/dirichlet.hpp"

namespace hessianlab {

namespace detail {

// Smooth bump on (-1, 1), extended by zero; constant factors cancel in the
// normalized averages below.
inline double mollifier_bump(double s) {
  const double q = s * s;
  return q < 1.0 ? std::exp(-1.0 / (1.0 - q)) : 0.0;
}

}  // namespace detail

/// Convolution of a sphere trace with a smooth bump of angular width eps.
///
/// The returned field evaluates anywhere off the origin by projecting onto
/// the direction x/|x| and averaging the trace over the geodesic cap of
/// radius eps around it (midpoint rule in the polar angle, periodic
/// trapezoid in azimuth for n = 3). Constant traces are reproduced exactly.
inline FieldPtr mollify_boundary_trace(int n, const FieldPtr& trace, double sphere_radius, double eps) {
  if (n < 2 || n > 3) throw std::invalid_argument("mollify_boundary_trace: n must be 2 or 3");
  if (!trace || trace->dim() != n) throw std::invalid_argument("mollify_boundary_trace: bad trace field");
  if (!(sphere_radius > 0.0) || !(eps > 0.0) || eps > 1.5)
    throw std::invalid_argument("mollify_boundary_trace: bad radius or width");

  if (n == 2) {
    return std::make_shared<CallableField>(2, [trace, sphere_radius, eps](const Vec& x) {
      const double theta0 = std::atan2(x[1], x[0]);
      constexpr int kNodes = 128;
      double num = 0.0, den = 0.0;
      for (int i = 0; i < kNodes; ++i) {
        const double t = eps * (2.0 * (i + 0.5) / kNodes - 1.0);
        const double w = detail::mollifier_bump(t / eps);
        Vec y(2);
        y[0] = sphere_radius * std::cos(theta0 + t);
        y[1] = sphere_radius * std::sin(theta0 + t);
        num += w * trace->value(y);
        den += w;
      }
      return num / den;
    });
  }

  return std::make_shared<CallableField>(3, [trace, sphere_radius, eps](const Vec& x) {
    const Vec nu = x.normalized();
    Vec a = Vec::Zero(3);
    a[std::abs(nu[0]) < 0.707 ? 0 : 1] = 1.0;
    const Vec t1 = (a - a.dot(nu) * nu).normalized();
    Vec t2(3);
    t2[0] = nu[1] * t1[2] - nu[2] * t1[1];
    t2[1] = nu[2] * t1[0] - nu[0] * t1[2];
    t2[2] = nu[0] * t1[1] - nu[1] * t1[0];

    constexpr int kPolar = 32, kAzimuth = 32;
    double num = 0.0, den = 0.0;
    for (int i = 0; i < kPolar; ++i) {
      const double t = eps * (i + 0.5) / kPolar;
      const double w = detail::mollifier_bump(t / eps) * std::sin(t);
      const double ct = std::cos(t), st = std::sin(t);
      for (int j = 0; j < kAzimuth; ++j) {
        const double phi = 2.0 * M_PI * j / kAzimuth;
        const Vec y = sphere_radius * (ct * nu + st * (std::cos(phi) * t1 + std::sin(phi) * t2));
        num += w * trace->value(y);
        den += w;
      }
    }
    return num / den;
  });
}

/// Smooth-approximation sequence: mollifies the boundary trace at angular
/// widths 2^{-j}, j = 1..levels, and solves the order-2 Dirichlet problem on
/// the half ball for each level. The rhs is shared across levels.
inline std::vector<GridFunction> approximation_pipeline(const DirichletProblem& p, int levels,
                                                        int resolution, const SolveOptions& opt = {}) {
  if (p.k != 2) throw std::invalid_argument("approximation_pipeline: order must be 2");
  if (p.domain.kind != DomainKind::kBall || std::abs(p.domain.radius - 0.5) > 1e-15)
    throw std::invalid_argument("approximation_pipeline: domain must be the ball of radius 1/2");
  if (levels < 1) throw std::invalid_argument("approximation_pipeline: levels must be >= 1");
  if (!p.boundary) throw std::invalid_argument("approximation_pipeline: missing boundary trace");

  std::vector<GridFunction> out;
  out.reserve(levels);
  for (int j = 1; j <= levels; ++j) {
    DirichletProblem pj = p;
    pj.boundary = mollify_boundary_trace(p.n, p.boundary, p.domain.radius, std::ldexp(1.0, -j));
    out.push_back(solve_dirichlet(pj, resolution, opt).first);
  }
  return out;
}

}  // namespace hessianlab
