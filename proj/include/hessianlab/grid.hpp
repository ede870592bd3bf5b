#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "hessianlab/scalar_field.hpp"

namespace hessianlab {

enum class DomainKind { kBox, kBall };

/// Box [-R, R]^n or open ball |x| < R, centered at the origin.
struct Domain {
  DomainKind kind = DomainKind::kBox;
  double radius = 1.0;
};

enum class NodeClass : std::uint8_t { kExterior, kBoundary, kInterior };

/// Uniform lattice over [-R, R]^n with `cells` intervals per axis.
///
/// Second differences are taken along lines: the n axes plus, for every pair
/// i < j, the two diagonals e_i + e_j and e_i - e_j. Each line arm either ends
/// at a lattice node or, on ball domains, at the exact sphere (a "cut"), whose
/// location is precomputed here. Divided differences over these arms are exact
/// on quadratics for any arm lengths, which is what keeps ball solves honest
/// near the curved boundary.
///
/// Ball interior nodes keep a small clearance (fraction of dx) from the
/// sphere; lattice nodes inside the sphere but within the clearance band are
/// treated as exterior and the arms of their neighbors extend past them to the
/// sphere itself. This bounds the 1/s factors in the difference weights.
class Grid {
 public:
  struct Line {
    Eigen::VectorXd w;  // step vector in index units: point = x + s * w, lattice step s = dx
    int i = -1, j = -1; // axes involved; j = -1 for axis lines
    int sign = +1;      // +1: e_i + e_j, -1: e_i - e_j (diagonals only)
  };

  struct Arm {
    double s = 0.0;      // arm length in line parameter units
    bool lattice = true; // true: ends at lattice node `nbr`; false: ends at cut point
    std::size_t nbr = 0;
    std::int64_t cut = -1;
  };

  Grid(int n, Domain dom, int cells, double clearance = 0.05)
      : n_(n), dom_(dom), cells_(cells), dx_(2.0 * dom.radius / cells), clearance_(clearance) {
    if (n < 2 || n > 4) throw std::invalid_argument("Grid: dimension outside [2,4]");
    if (cells < 8) throw std::invalid_argument("Grid: resolution below 8 cells per axis");
    if (!(dom.radius > 0.0)) throw std::invalid_argument("Grid: domain radius must be positive");
    build_lines();
    classify();
    if (dom_.kind == DomainKind::kBall) build_cuts();
  }

  int dim() const { return n_; }
  int cells() const { return cells_; }
  int nodes_per_axis() const { return cells_ + 1; }
  double spacing() const { return dx_; }
  double radius() const { return dom_.radius; }
  const Domain& domain() const { return dom_; }

  std::size_t node_count() const {
    std::size_t c = 1;
    for (int i = 0; i < n_; ++i) c *= static_cast<std::size_t>(nodes_per_axis());
    return c;
  }

  void to_multi(std::size_t flat, int* m) const {
    const int npa = nodes_per_axis();
    for (int i = n_ - 1; i >= 0; --i) {
      m[i] = static_cast<int>(flat % npa);
      flat /= npa;
    }
  }

  std::size_t to_flat(const int* m) const {
    std::size_t f = 0;
    for (int i = 0; i < n_; ++i) f = f * nodes_per_axis() + m[i];
    return f;
  }

  Vec coord(std::size_t flat) const {
    int m[4];
    to_multi(flat, m);
    Vec x(n_);
    for (int i = 0; i < n_; ++i) x[i] = -dom_.radius + m[i] * dx_;
    return x;
  }

  NodeClass cls(std::size_t flat) const { return cls_[flat]; }

  const std::vector<std::size_t>& interior_nodes() const { return interior_nodes_; }
  std::int64_t interior_index(std::size_t flat) const { return interior_index_[flat]; }

  int line_count() const { return static_cast<int>(lines_.size()); }
  const Line& line(int l) const { return lines_[l]; }

  /// Arm of the given line at an interior node; dir 0 steps along +w, 1 along -w.
  Arm arm(std::size_t flat, int l, int dir) const {
    if (dom_.kind == DomainKind::kBall) {
      const std::int64_t id = cut_ids_[(static_cast<std::size_t>(interior_index_[flat]) * lines_.size() + l) * 2 + dir];
      if (id >= 0) return Arm{cut_s_[id], false, 0, id};
    }
    int m[4];
    to_multi(flat, m);
    step_multi(m, l, dir);
    return Arm{dx_, true, to_flat(m), -1};
  }

  std::size_t cut_count() const { return cut_s_.size(); }

  Vec cut_point(std::size_t id) const {
    Vec x(n_);
    for (int i = 0; i < n_; ++i) x[i] = cut_points_[id * n_ + i];
    return x;
  }

  /// Flat index of the lattice node nearest to x (clamped into the lattice).
  std::size_t nearest_node(const Vec& x) const {
    int m[4];
    for (int i = 0; i < n_; ++i) {
      const int idx = static_cast<int>(std::lround((x[i] + dom_.radius) / dx_));
      m[i] = std::min(std::max(idx, 0), nodes_per_axis() - 1);
    }
    return to_flat(m);
  }

  bool inside_domain(const Vec& x) const {
    if (dom_.kind == DomainKind::kBox) {
      for (int i = 0; i < n_; ++i)
        if (std::abs(x[i]) > dom_.radius) return false;
      return true;
    }
    return x.norm() < dom_.radius;
  }

 private:
  void build_lines() {
    for (int i = 0; i < n_; ++i) {
      Line l;
      l.w = Vec::Zero(n_);
      l.w[i] = 1.0;
      l.i = i;
      lines_.push_back(std::move(l));
    }
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j)
        for (int sign : {+1, -1}) {
          Line l;
          l.w = Vec::Zero(n_);
          l.w[i] = 1.0;
          l.w[j] = sign;
          l.i = i;
          l.j = j;
          l.sign = sign;
          lines_.push_back(std::move(l));
        }
  }

  void step_multi(int* m, int l, int dir) const {
    const Line& ln = lines_[l];
    const int d = dir == 0 ? +1 : -1;
    m[ln.i] += d;
    if (ln.j >= 0) m[ln.j] += d * ln.sign;
  }

  bool multi_in_lattice(const int* m) const {
    for (int i = 0; i < n_; ++i)
      if (m[i] < 0 || m[i] >= nodes_per_axis()) return false;
    return true;
  }

  void classify() {
    const std::size_t count = node_count();
    cls_.assign(count, NodeClass::kExterior);
    interior_index_.assign(count, -1);
    const double rin = dom_.radius - clearance_ * dx_;
    int m[4];
    for (std::size_t f = 0; f < count; ++f) {
      to_multi(f, m);
      if (dom_.kind == DomainKind::kBox) {
        bool on_face = false;
        for (int i = 0; i < n_; ++i) on_face = on_face || m[i] == 0 || m[i] == nodes_per_axis() - 1;
        cls_[f] = on_face ? NodeClass::kBoundary : NodeClass::kInterior;
      } else {
        double r2 = 0.0;
        for (int i = 0; i < n_; ++i) {
          const double xi = -dom_.radius + m[i] * dx_;
          r2 += xi * xi;
        }
        cls_[f] = r2 <= rin * rin ? NodeClass::kInterior : NodeClass::kExterior;
      }
      if (cls_[f] == NodeClass::kInterior) {
        interior_index_[f] = static_cast<std::int64_t>(interior_nodes_.size());
        interior_nodes_.push_back(f);
      }
    }
  }

  void build_cuts() {
    const std::size_t L = lines_.size();
    cut_ids_.assign(interior_nodes_.size() * L * 2, -1);
    const double R2 = dom_.radius * dom_.radius;
    int m[4];
    for (std::size_t d = 0; d < interior_nodes_.size(); ++d) {
      const std::size_t f = interior_nodes_[d];
      const Vec x = coord(f);
      for (std::size_t l = 0; l < L; ++l)
        for (int dir = 0; dir < 2; ++dir) {
          to_multi(f, m);
          step_multi(m, static_cast<int>(l), dir);
          if (multi_in_lattice(m) && cls_[to_flat(m)] == NodeClass::kInterior) continue;
          // Arm leaves the interior set: intersect the line with the sphere.
          Vec w = lines_[l].w * dx_ * (dir == 0 ? 1.0 : -1.0);
          const double a = w.squaredNorm();
          const double b = x.dot(w);
          const double c = x.squaredNorm() - R2;
          const double disc = b * b - a * c;
          if (disc <= 0.0) throw std::logic_error("Grid: interior node fails to reach the sphere");
          const double s = (-b + std::sqrt(disc)) / a;  // in units of the lattice step
          if (!(s > 0.0)) throw std::logic_error("Grid: nonpositive cut arm");
          cut_ids_[(d * L + l) * 2 + dir] = static_cast<std::int64_t>(cut_s_.size());
          cut_s_.push_back(s * dx_);  // parameter units: s = dx reaches the lattice neighbor
          const Vec bp = x + s * w;
          for (int i = 0; i < n_; ++i) cut_points_.push_back(bp[i]);
        }
    }
  }

  int n_;
  Domain dom_;
  int cells_;
  double dx_;
  double clearance_;
  std::vector<Line> lines_;
  std::vector<NodeClass> cls_;
  std::vector<std::int64_t> interior_index_;
  std::vector<std::size_t> interior_nodes_;
  std::vector<std::int64_t> cut_ids_;
  std::vector<double> cut_s_;
  std::vector<double> cut_points_;
};

using GridPtr = std::shared_ptr<const Grid>;

}  // namespace hessianlab
