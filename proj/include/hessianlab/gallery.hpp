#pragma once

#include <cmath>
#include <stdexcept>

#include "hessianlab/scalar_field.hpp"
#include "hessianlab/symmetric_matrix.hpp"

namespace hessianlab {

/// Candidate with a degenerate line: u(x) = |x'|^beta g(x_n), beta = 2 - 2/k,
/// x' the first n-1 coordinates and g(t) = 1 + a t^2. The function vanishes
/// exactly on the x_n-axis, its Hessian blows up like |x'|^{beta-2} near the
/// axis, and away from the axis it is smooth with exact derivatives below.
///
/// The candidate is convex only for |x_n| <= convex_axial_halfwidth(); the
/// 2x2 radial/axial Hessian block loses positivity beyond that window, so
/// cone-sensitive sampling should stay inside it.
class PogorelovCandidate : public ScalarField {
 public:
  PogorelovCandidate(int k, int n, double profile_coef = 1.0)
      : ScalarField(n), k_(k), beta_(2.0 - 2.0 / k), a_(profile_coef) {
    if (k < 3) throw std::invalid_argument("PogorelovCandidate: requires k >= 3");
    if (n < k + 1) throw std::invalid_argument("PogorelovCandidate: requires n >= k + 1");
    if (n > kMaxDim) throw std::invalid_argument("PogorelovCandidate: n too large");
    if (!(a_ > 0.0)) throw std::invalid_argument("PogorelovCandidate: profile coefficient must be positive");
  }

  int order() const { return k_; }
  double exponent() const { return beta_; }

  /// Largest t with the candidate convex on {|x_n| <= t}: the radial/axial
  /// block determinant (beta-1) g g'' - beta g'^2 is nonnegative exactly for
  /// t^2 <= (beta - 1) / (a (beta + 1)).
  double convex_axial_halfwidth() const { return std::sqrt((beta_ - 1.0) / (a_ * (beta_ + 1.0))); }

  double value(const Vec& x) const override {
    check_point_dim(*this, x, "PogorelovCandidate::value");
    return std::pow(radial(x), beta_) * profile(x[dim() - 1]);
  }

  Vec gradient(const Vec& x) const override {
    check_point_dim(*this, x, "PogorelovCandidate::gradient");
    const int n = dim();
    const double r = off_axis_radial(x);
    const double g = profile(x[n - 1]);
    const double rb2 = std::pow(r, beta_ - 2.0);
    Vec grad(n);
    for (int i = 0; i < n - 1; ++i) grad[i] = beta_ * rb2 * x[i] * g;
    grad[n - 1] = std::pow(r, beta_) * dprofile(x[n - 1]);
    return grad;
  }

  SymmetricMatrix hessian(const Vec& x) const override {
    check_point_dim(*this, x, "PogorelovCandidate::hessian");
    const int n = dim();
    const double r = off_axis_radial(x);
    const double t = x[n - 1];
    const double g = profile(t);
    const double rb2 = std::pow(r, beta_ - 2.0);
    const double rb4 = std::pow(r, beta_ - 4.0);
    SymmetricMatrix m(n);
    for (int i = 0; i < n - 1; ++i) {
      m.set(i, i, beta_ * g * ((beta_ - 2.0) * rb4 * x[i] * x[i] + rb2));
      for (int j = i + 1; j < n - 1; ++j) m.set(i, j, beta_ * (beta_ - 2.0) * g * rb4 * x[i] * x[j]);
      m.set(i, n - 1, beta_ * rb2 * x[i] * dprofile(t));
    }
    m.set(n - 1, n - 1, std::pow(r, beta_) * ddprofile());
    return m;
  }

 private:
  double radial(const Vec& x) const {
    double s = 0.0;
    for (int i = 0; i < dim() - 1; ++i) s += x[i] * x[i];
    return std::sqrt(s);
  }

  double off_axis_radial(const Vec& x) const {
    const double r = radial(x);
    if (r < 1e-14)
      throw std::domain_error("PogorelovCandidate: derivatives are singular on the axis |x'| = 0");
    return r;
  }

  double profile(double t) const { return 1.0 + a_ * t * t; }
  double dprofile(double t) const { return 2.0 * a_ * t; }
  double ddprofile() const { return 2.0 * a_; }

  int k_;
  double beta_;
  double a_;
};

inline PogorelovCandidate pogorelov_gallery(int k, int n, double profile_coef = 1.0) {
  return PogorelovCandidate(k, n, profile_coef);
}

}  // namespace hessianlab
