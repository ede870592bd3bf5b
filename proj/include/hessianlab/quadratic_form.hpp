#pragma once

#include <Eigen/Dense>

#include "hessianlab/scalar_field.hpp"
#include "hessianlab/symmetric_matrix.hpp"

namespace hessianlab {

/// Polynomial x -> x.A x / 2 + b.x + c with constant Hessian A.
class QuadraticForm : public ScalarField {
 public:
  QuadraticForm(SymmetricMatrix a, Vec b, double c)
      : ScalarField(a.dim()), a_(std::move(a)), b_(std::move(b)), c_(c) {
    if (b_.size() != a_.dim()) throw std::invalid_argument("QuadraticForm: b dimension mismatch");
  }

  /// Form written around a base point: value(x) = y.A y / 2 + b0.y + c0 with
  /// y = x - x0, expanded into global coefficients.
  static QuadraticForm centered(const Vec& x0, const SymmetricMatrix& a, const Vec& b0, double c0) {
    const Eigen::MatrixXd ad = a.dense();
    Vec b = b0 - ad * x0;
    double c = c0 - b0.dot(x0) + 0.5 * x0.dot(ad * x0);
    return QuadraticForm(a, std::move(b), c);
  }

  double value(const Vec& x) const override {
    check_point_dim(*this, x, "QuadraticForm::value");
    return 0.5 * x.dot(a_.dense() * x) + b_.dot(x) + c_;
  }

  Vec gradient(const Vec& x) const override {
    check_point_dim(*this, x, "QuadraticForm::gradient");
    return a_.dense() * x + b_;
  }

  SymmetricMatrix hessian(const Vec&) const override { return a_; }
  const SymmetricMatrix& hessian() const { return a_; }
  const Vec& linear() const { return b_; }
  double constant() const { return c_; }

 private:
  SymmetricMatrix a_;
  Vec b_;
  double c_;
};

}  // namespace hessianlab
