#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "hessianlab/scalar_field.hpp"

namespace hessianlab {

/// Result of fitting nested affine subspaces through an anchor point.
///
/// axes columns are orthonormal, ordered by decreasing second moment, so the
/// best d-dimensional subspace is origin + span(axes.col(0..d-1)). widths[d]
/// is the max distance from the point set to that subspace; widths[n] = 0.
struct AffineFitReport {
  Vec origin;
  Eigen::MatrixXd axes;
  std::vector<double> widths;

  /// Least dimension whose width is within r.
  int smallest_dimension(double r) const {
    for (std::size_t d = 0; d < widths.size(); ++d)
      if (widths[d] <= r) return static_cast<int>(d);
    return static_cast<int>(widths.size()) - 1;  // widths[n] = 0 <= r for r >= 0
  }
};

/// Principal-axis fit of the point set anchored at `anchor`.
inline AffineFitReport affine_fit(const std::vector<Vec>& points, const Vec& anchor) {
  if (points.empty()) throw std::invalid_argument("affine_fit: empty point set");
  const int n = static_cast<int>(anchor.size());
  for (const Vec& p : points)
    if (p.size() != n) throw std::invalid_argument("affine_fit: mixed point dimensions");

  Eigen::MatrixXd moment = Eigen::MatrixXd::Zero(n, n);
  for (const Vec& p : points) {
    const Vec d = p - anchor;
    moment.noalias() += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(moment);
  if (es.info() != Eigen::Success) throw std::runtime_error("affine_fit: eigendecomposition failed");

  AffineFitReport rep;
  rep.origin = anchor;
  rep.axes = Eigen::MatrixXd(n, n);
  for (int j = 0; j < n; ++j) rep.axes.col(j) = es.eigenvectors().col(n - 1 - j);  // descending

  rep.widths.assign(static_cast<std::size_t>(n) + 1, 0.0);
  for (const Vec& p : points) {
    const Vec coords = rep.axes.transpose() * (p - anchor);
    double tail = 0.0;
    for (int d = n - 1; d >= 0; --d) {
      tail += coords[d] * coords[d];
      rep.widths[d] = std::max(rep.widths[d], tail);
    }
  }
  for (int d = 0; d <= n; ++d) rep.widths[d] = std::sqrt(rep.widths[d]);
  return rep;
}

/// Centroid-anchored overload.
inline AffineFitReport affine_fit(const std::vector<Vec>& points) {
  if (points.empty()) throw std::invalid_argument("affine_fit: empty point set");
  Vec c = Vec::Zero(points.front().size());
  for (const Vec& p : points) c += p;
  return affine_fit(points, Vec(c / static_cast<double>(points.size())));
}

}  // namespace hessianlab
