#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "hessianlab/symmetric_matrix.hpp"

namespace hessianlab {

namespace tolerances {
/// Absolute slack on sigma_l for closed-cone membership.
inline constexpr double kCone = 1e-12;
/// Degeneracy floor on sigma_2 below which the operator may not be linearized.
inline constexpr double kEll = 1e-10;
}  // namespace tolerances

namespace detail {

/// Determinant of the k x k principal submatrix picked out by idx, via
/// Gaussian elimination with partial pivoting on a stack copy.
inline double principal_minor(const SymmetricMatrix& m, const int* idx, int k) {
  double a[kMaxDim][kMaxDim];
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) a[r][c] = m(idx[r], idx[c]);
  double det = 1.0;
  for (int col = 0; col < k; ++col) {
    int piv = col;
    for (int r = col + 1; r < k; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (a[piv][col] == 0.0) return 0.0;
    if (piv != col) {
      for (int c = col; c < k; ++c) std::swap(a[piv][c], a[col][c]);
      det = -det;
    }
    det *= a[col][col];
    for (int r = col + 1; r < k; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < k; ++c) a[r][c] -= f * a[col][c];
    }
  }
  return det;
}

inline bool next_combination(int* idx, int k, int n) {
  int i = k - 1;
  while (i >= 0 && idx[i] == n - k + i) --i;
  if (i < 0) return false;
  ++idx[i];
  for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  return true;
}

inline void check_order(int k, int n, const char* who) {
  if (k < 1 || k > n)
    throw std::invalid_argument(std::string(who) + ": order k = " + std::to_string(k) +
                                " outside [1," + std::to_string(n) + "]");
}

}  // namespace detail

/// k-th elementary symmetric function of the eigenvalues of m, computed as the
/// sum of all k x k principal minors. Exact combinatorics; no eigensolve.
inline double sigma_k(const SymmetricMatrix& m, int k) {
  detail::check_order(k, m.dim(), "sigma_k");
  int idx[kMaxDim];
  for (int i = 0; i < k; ++i) idx[i] = i;
  double s = 0.0;
  do {
    s += detail::principal_minor(m, idx, k);
  } while (detail::next_combination(idx, k, m.dim()));
  return s;
}

/// Gradient of sigma_k with respect to the matrix argument, as the symmetric
/// matrix G with d/dt sigma_k(M + tE) = <G, E> for symmetric directions E.
/// Computed through the polynomial recursion T_0 = I, T_j = sigma_j I - M T_{j-1},
/// whose step k-1 term is the gradient. For diagonal M the i-th diagonal entry
/// is sigma_{k-1} of the eigenvalues with the i-th one removed.
inline SymmetricMatrix sigma_k_gradient(const SymmetricMatrix& m, int k) {
  detail::check_order(k, m.dim(), "sigma_k_gradient");
  const int n = m.dim();
  const Eigen::MatrixXd md = m.dense();
  Eigen::MatrixXd t = Eigen::MatrixXd::Identity(n, n);
  for (int j = 1; j < k; ++j) t = sigma_k(m, j) * Eigen::MatrixXd::Identity(n, n) - md * t;
  return SymmetricMatrix::from_dense(t);
}

/// Eigenvalues sorted in descending order.
struct Spectrum {
  std::vector<double> eigenvalues;
};

inline Spectrum eigenvalues(const SymmetricMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.dense(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigenvalues: decomposition failed");
  Spectrum s;
  s.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + m.dim());
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end(), std::greater<double>());
  return s;
}

enum class ConeMode { kOpen, kClosed };

/// Outcome of a Garding-cone membership question for order k.
struct ConeReport {
  int k = 0;
  std::vector<double> sigmas;  // sigma_1 .. sigma_k
  bool in_open_cone = false;   // all sigmas strictly positive
  bool in_closure = false;     // all sigmas >= -kCone

  bool holds(ConeMode mode) const { return mode == ConeMode::kOpen ? in_open_cone : in_closure; }
};

/// Tests whether m lies in the order-k cone: open mode asks sigma_l > 0 for
/// l = 1..k, closed mode allows sigma_l >= -kCone. Both answers are reported.
inline ConeReport cone_membership(const SymmetricMatrix& m, int k, ConeMode = ConeMode::kOpen) {
  detail::check_order(k, m.dim(), "cone_membership");
  ConeReport r;
  r.k = k;
  r.in_open_cone = true;
  r.in_closure = true;
  for (int l = 1; l <= k; ++l) {
    const double s = sigma_k(m, l);
    r.sigmas.push_back(s);
    r.in_open_cone = r.in_open_cone && s > 0.0;
    r.in_closure = r.in_closure && s >= -tolerances::kCone;
  }
  return r;
}

/// Affine map N -> <A, N> + c on symmetric matrices.
struct LinearOperator {
  SymmetricMatrix coefficient_matrix;
  double offset = 0.0;

  double apply(const SymmetricMatrix& n) const {
    return trace_product(coefficient_matrix, n) + offset;
  }
};

/// Raised when an operation requires a point of the open order-2 cone and the
/// argument is outside it (or too degenerate to linearize).
class ConeExitError : public std::runtime_error {
 public:
  ConeExitError(std::string msg, ConeReport rep)
      : std::runtime_error(std::move(msg)), report(std::move(rep)) {}
  ConeReport report;
};

/// Tangent majorant of F = sigma_2^{1/2} at m: returns (A, c) with
/// <A, N> + c >= F(N) for all N in the closed order-2 cone and equality at m.
/// A = grad sigma_2(m) / (2 sqrt(sigma_2(m))); concavity of F supplies the
/// majorization. Requires m in the open cone with sigma_2 above the floor.
inline LinearOperator support_linearization(const SymmetricMatrix& m) {
  ConeReport rep = cone_membership(m, 2, ConeMode::kOpen);
  const double s2 = rep.sigmas[1];
  if (!rep.in_open_cone || s2 < tolerances::kEll)
    throw ConeExitError("support_linearization: matrix outside the open order-2 cone", rep);
  const double f = std::sqrt(s2);
  SymmetricMatrix a = sigma_k_gradient(m, 2).scaled(1.0 / (2.0 * f));
  return LinearOperator{a, f - trace_product(a, m)};
}

}  // namespace hessianlab
