#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace hessianlab {

/// Largest matrix dimension the toolkit handles.
inline constexpr int kMaxDim = 8;

/// Dense symmetric n x n matrix, 2 <= n <= 8.
///
/// Only the upper triangle is stored (row-wise, packed); reads and writes of
/// (i, j) and (j, i) alias the same entry, so the matrix is symmetric by
/// construction and never re-checked. All entries must stay finite; the
/// mutators enforce this.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(int n) : n_(checked_dim(n)) { data_.fill(0.0); }

  static SymmetricMatrix identity(int n) {
    SymmetricMatrix m(n);
    for (int i = 0; i < n; ++i) m.set(i, i, 1.0);
    return m;
  }

  static SymmetricMatrix diagonal(std::initializer_list<double> d) {
    SymmetricMatrix m(static_cast<int>(d.size()));
    int i = 0;
    for (double v : d) {
      m.set(i, i, v);
      ++i;
    }
    return m;
  }

  static SymmetricMatrix diagonal(const Eigen::VectorXd& d) {
    SymmetricMatrix m(static_cast<int>(d.size()));
    for (int i = 0; i < d.size(); ++i) m.set(i, i, d[i]);
    return m;
  }

  /// Builds from a dense matrix, symmetrizing as (A + A^T)/2.
  static SymmetricMatrix from_dense(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("from_dense: matrix not square");
    SymmetricMatrix m(static_cast<int>(a.rows()));
    for (int i = 0; i < m.n_; ++i)
      for (int j = i; j < m.n_; ++j) m.set(i, j, 0.5 * (a(i, j) + a(j, i)));
    return m;
  }

  int dim() const { return n_; }

  double operator()(int i, int j) const { return data_[pack(i, j)]; }

  void set(int i, int j, double v) {
    if (!std::isfinite(v))
      throw std::invalid_argument("SymmetricMatrix: non-finite entry at (" + std::to_string(i) +
                                  "," + std::to_string(j) + ")");
    data_[pack(i, j)] = v;
  }

  void add(int i, int j, double v) { set(i, j, (*this)(i, j) + v); }

  double trace() const {
    double t = 0.0;
    for (int i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
  }

  /// M + tau * I.
  SymmetricMatrix shifted(double tau) const {
    SymmetricMatrix m = *this;
    for (int i = 0; i < n_; ++i) m.set(i, i, m(i, i) + tau);
    return m;
  }

  SymmetricMatrix scaled(double s) const {
    SymmetricMatrix m = *this;
    for (double& v : m.data_) v *= s;
    for (double v : m.data_)
      if (!std::isfinite(v)) throw std::invalid_argument("SymmetricMatrix: scale overflow");
    return m;
  }

  Eigen::MatrixXd dense() const {
    Eigen::MatrixXd a(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) a(i, j) = (*this)(i, j);
    return a;
  }

  double max_abs() const {
    double m = 0.0;
    for (int i = 0; i < n_; ++i)
      for (int j = i; j < n_; ++j) m = std::max(m, std::abs((*this)(i, j)));
    return m;
  }

  bool operator==(const SymmetricMatrix& o) const { return n_ == o.n_ && data_ == o.data_; }

 private:
  static int checked_dim(int n) {
    if (n < 2 || n > kMaxDim)
      throw std::invalid_argument("SymmetricMatrix: dimension " + std::to_string(n) +
                                  " outside [2," + std::to_string(kMaxDim) + "]");
    return n;
  }

  // Packed index into the upper triangle; (i, j) and (j, i) collapse together.
  int pack(int i, int j) const {
    if (i < 0 || j < 0 || i >= n_ || j >= n_)
      throw std::out_of_range("SymmetricMatrix: index out of range");
    if (i > j) std::swap(i, j);
    return i * n_ - i * (i - 1) / 2 + (j - i);
  }

  int n_;
  std::array<double, kMaxDim*(kMaxDim + 1) / 2> data_;
};

/// Frobenius pairing <A, B> = sum_ij A_ij B_ij of two symmetric matrices.
inline double trace_product(const SymmetricMatrix& a, const SymmetricMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("trace_product: dimension mismatch");
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) {
    s += a(i, i) * b(i, i);
    for (int j = i + 1; j < a.dim(); ++j) s += 2.0 * a(i, j) * b(i, j);
  }
  return s;
}

}  // namespace hessianlab
