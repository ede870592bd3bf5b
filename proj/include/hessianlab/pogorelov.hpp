#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "hessianlab/grid_function.hpp"
#include "hessianlab/quadratic_form.hpp"

namespace hessianlab {

/// Spectral norm (largest absolute eigenvalue) of a symmetric matrix.
inline double spectral_norm(const SymmetricMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.dense(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("spectral_norm: eigensolve failed");
  return std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(m.dim() - 1)));
}

/// Interior-degenerate estimate functional: max over the region of
/// (w - u)^4 * ||D^2 u||. The region must consist of interior nodes lying
/// strictly under the comparison quadratic w.
inline double pogorelov_functional(const GridFunction& u, const QuadraticForm& w,
                                   const std::vector<std::size_t>& region) {
  const Grid& g = u.grid();
  if (w.dim() != g.dim()) throw std::invalid_argument("pogorelov_functional: dimension mismatch");
  if (region.empty()) throw std::invalid_argument("pogorelov_functional: empty region");

  double best = 0.0;
  for (std::size_t f : region) {
    const double gap = w.value(g.coord(f)) - u.value(f);
    if (!(gap > 0.0))
      throw std::invalid_argument("pogorelov_functional: u >= w at node " + std::to_string(f));
    const double weight = gap * gap * gap * gap;
    best = std::max(best, weight * spectral_norm(discrete_hessian(u, f)));
  }
  return best;
}

/// Connected component of {u < w} containing the interior node nearest the
/// origin; nodes connect through axis lattice arms. Empty when that node is
/// not below w. Restricted to interior nodes so the functional above can
/// take Hessians everywhere on it.
inline std::vector<std::size_t> origin_component(const GridFunction& u, const QuadraticForm& w) {
  const Grid& g = u.grid();
  if (w.dim() != g.dim()) throw std::invalid_argument("origin_component: dimension mismatch");

  const std::vector<std::size_t>& interior = g.interior_nodes();
  if (interior.empty()) return {};
  std::size_t seed = interior.front();
  double seed_dist = g.coord(seed).norm();
  for (std::size_t f : interior) {
    const double d = g.coord(f).norm();
    if (d < seed_dist) {
      seed_dist = d;
      seed = f;
    }
  }

  const auto below = [&](std::size_t f) {
    return u.defined(f) && u.value(f) < w.value(g.coord(f));
  };
  if (!below(seed)) return {};

  std::vector<int> axis_lines;
  for (int l = 0; l < g.line_count(); ++l)
    if (g.line(l).j < 0) axis_lines.push_back(l);

  std::vector<std::size_t> component;
  std::vector<bool> seen(g.node_count(), false);
  std::queue<std::size_t> frontier;
  seen[seed] = true;
  frontier.push(seed);
  while (!frontier.empty()) {
    const std::size_t f = frontier.front();
    frontier.pop();
    component.push_back(f);
    for (int l : axis_lines)
      for (int dir = 0; dir < 2; ++dir) {
        const Grid::Arm a = g.arm(f, l, dir);
        if (!a.lattice || seen[a.nbr]) continue;
        if (g.cls(a.nbr) != NodeClass::kInterior || !below(a.nbr)) continue;
        seen[a.nbr] = true;
        frontier.push(a.nbr);
      }
  }
  std::sort(component.begin(), component.end());
  return component;
}

}  // namespace hessianlab
