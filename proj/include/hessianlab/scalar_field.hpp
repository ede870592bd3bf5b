#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <stdexcept>

#include "hessianlab/symmetric_matrix.hpp"

namespace hessianlab {

using Vec = Eigen::VectorXd;

/// A scalar function of n variables with optional derivative information.
///
/// The default gradient/hessian fall back to central finite differences; types
/// with closed forms override them.
class ScalarField {
 public:
  explicit ScalarField(int n) : n_(n) {}
  virtual ~ScalarField() = default;

  int dim() const { return n_; }

  virtual double value(const Vec& x) const = 0;

  virtual Vec gradient(const Vec& x) const {
    const double h = fd_step();
    Vec g(n_);
    Vec p = x;
    for (int i = 0; i < n_; ++i) {
      p[i] = x[i] + h;
      const double up = value(p);
      p[i] = x[i] - h;
      const double um = value(p);
      p[i] = x[i];
      g[i] = (up - um) / (2.0 * h);
    }
    return g;
  }

  virtual SymmetricMatrix hessian(const Vec& x) const {
    const double h = fd_step();
    SymmetricMatrix m(n_);
    const double u0 = value(x);
    Vec p = x;
    for (int i = 0; i < n_; ++i) {
      p[i] = x[i] + h;
      const double up = value(p);
      p[i] = x[i] - h;
      const double um = value(p);
      p[i] = x[i];
      m.set(i, i, (up - 2.0 * u0 + um) / (h * h));
    }
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j) {
        p[i] = x[i] + h;
        p[j] = x[j] + h;
        const double upp = value(p);
        p[j] = x[j] - h;
        const double upm = value(p);
        p[i] = x[i] - h;
        const double umm = value(p);
        p[j] = x[j] + h;
        const double ump = value(p);
        p[i] = x[i];
        p[j] = x[j];
        m.set(i, j, (upp - upm - ump + umm) / (4.0 * h * h));
      }
    return m;
  }

 protected:
  static constexpr double fd_step() { return 1e-5; }

 private:
  int n_;
};

/// Wraps a plain callable as a ScalarField (derivatives by finite differences).
class CallableField : public ScalarField {
 public:
  CallableField(int n, std::function<double(const Vec&)> f)
      : ScalarField(n), f_(std::move(f)) {}
  double value(const Vec& x) const override { return f_(x); }

 private:
  std::function<double(const Vec&)> f_;
};

using FieldPtr = std::shared_ptr<const ScalarField>;

inline void check_point_dim(const ScalarField& f, const Vec& x, const char* who) {
  if (x.size() != f.dim()) throw std::invalid_argument(std::string(who) + ": point dimension mismatch");
}

}  // namespace hessianlab
