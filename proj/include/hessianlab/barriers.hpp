#pragma once

#include <algorithm>
#include <stdexcept>

#include "hessianlab/quadratic_form.hpp"

namespace hessianlab {

/// Solid cylinder {|x'| < radius} x (0, height) with its flat axis along the
/// given coordinate (the primed variables are the remaining ones).
struct Cylinder {
  double radius = 1.0;
  double height = 1.0;
  int axis = -1;  // defaults to the last coordinate at use sites
};

/// sigma_2(D^2 P) = c1(n) h^2 + c2(n) h^2 / H^2 for the cylinder barrier.
inline double barrier_c1(int n) { return 2.0 * (n - 1) * (n - 2); }
inline double barrier_c2(int n) { return 16.0 * (n - 1); }

namespace detail {
inline void check_barrier_dim(int n, const char* who) {
  if (n < 2 || n > kMaxDim)
    throw std::invalid_argument(std::string(who) + ": dimension outside [2,8]");
}
}  // namespace detail

/// Paraboloid P(x) = h |x'|^2 + (4h/H^2) (x_n - H/2)^2 over the unit-radius
/// cylinder of height H. It vanishes at the cylinder's center, equals h on the
/// lateral wall's mid-height circle, and dominates h on the whole boundary.
inline QuadraticForm make_cylinder_barrier(double h, double H, int n) {
  detail::check_barrier_dim(n, "make_cylinder_barrier");
  if (!(h > 0.0) || !(H > 0.0))
    throw std::invalid_argument("make_cylinder_barrier: h and H must be positive");
  SymmetricMatrix a(n);
  for (int i = 0; i < n - 1; ++i) a.set(i, i, 2.0 * h);
  a.set(n - 1, n - 1, 8.0 * h / (H * H));
  Vec b = Vec::Zero(n);
  b[n - 1] = -4.0 * h / H;
  return QuadraticForm(a, b, h);
}

/// Closed form of sigma_2 of the cylinder barrier's Hessian.
inline double barrier_sigma2_value(double h, double H, int n) {
  detail::check_barrier_dim(n, "barrier_sigma2_value");
  if (!(h > 0.0) || !(H > 0.0))
    throw std::invalid_argument("barrier_sigma2_value: h and H must be positive");
  return barrier_c1(n) * h * h + barrier_c2(n) * h * h / (H * H);
}

/// A sufficient ceiling on h: for h <= h_star(n, H) the barrier's sigma_2
/// stays strictly below 1.
inline double h_star(int n, double H) {
  detail::check_barrier_dim(n, "h_star");
  if (!(H > 0.0)) throw std::invalid_argument("h_star: H must be positive");
  return std::min(1.0, H) / (8.0 * n);
}

/// The sliding comparison function
///   w(x) = delta [ 2(n-2)(x_1^2 + x_2^2) - (x_3^2 + ... + x_n^2) ],
/// whose Hessian is diag(4 delta (n-2), 4 delta (n-2), -2 delta, ...). It sits
/// on the boundary of the order-2 cone: sigma_2 is nonnegative for every
/// delta, with equality exactly in dimension 3. Requires n >= 3.
inline QuadraticForm make_wdelta(double delta, int n) {
  detail::check_barrier_dim(n, "make_wdelta");
  if (n < 3) throw std::invalid_argument("make_wdelta: requires n >= 3");
  if (!(delta > 0.0)) throw std::invalid_argument("make_wdelta: delta must be positive");
  SymmetricMatrix a(n);
  a.set(0, 0, 4.0 * delta * (n - 2));
  a.set(1, 1, 4.0 * delta * (n - 2));
  for (int i = 2; i < n; ++i) a.set(i, i, -2.0 * delta);
  return QuadraticForm(a, Vec::Zero(n), 0.0);
}

/// Wall barrier w(x) = delta ( 2(n-2)|y|^2 - |z|^2 + 1/8 ) with x = (y, z),
/// y the first two coordinates. Same Hessian as make_wdelta; the constant
/// lifts the saddle so w(0) = delta / 8.
inline QuadraticForm make_wall_barrier(double delta, int n) {
  QuadraticForm base = make_wdelta(delta, n);
  return QuadraticForm(base.hessian(), base.linear(), delta / 8.0);
}

}  // namespace hessianlab
