#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hessianlab/grid.hpp"
#include "hessianlab/scalar_field.hpp"
#include "hessianlab/symmetric_matrix.hpp"

namespace hessianlab {

/// Raised when a node's difference stencil would need data the grid does not
/// carry (non-interior node, or an undefined neighbor value).
class BoundaryProximityError : public std::runtime_error {
 public:
  BoundaryProximityError(std::string msg, std::size_t node)
      : std::runtime_error(std::move(msg)), node(node) {}
  std::size_t node;
};

/// Scalar samples over a Grid. Lattice values live in `values` (row-major,
/// last axis fastest); `defined` masks the nodes that carry data. Ball grids
/// additionally carry boundary samples at the grid's cut points so that
/// second differences next to the sphere are closed.
class GridFunction {
 public:
  explicit GridFunction(GridPtr grid)
      : grid_(std::move(grid)),
        values_(grid_->node_count(), 0.0),
        defined_(grid_->node_count(), 0),
        cut_values_(grid_->cut_count(), 0.0) {}

  const Grid& grid() const { return *grid_; }
  GridPtr grid_ptr() const { return grid_; }

  double value(std::size_t flat) const { return values_[flat]; }
  bool defined(std::size_t flat) const { return defined_[flat] != 0; }

  void set(std::size_t flat, double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("GridFunction: non-finite value");
    values_[flat] = v;
    defined_[flat] = 1;
  }

  double cut_value(std::size_t id) const { return cut_values_[id]; }
  void set_cut_value(std::size_t id, double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("GridFunction: non-finite boundary value");
    cut_values_[id] = v;
  }

  const std::vector<double>& values() const { return values_; }

  /// max - min over defined nodes.
  double osc() const {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t f = 0; f < values_.size(); ++f)
      if (defined_[f]) {
        lo = std::min(lo, values_[f]);
        hi = std::max(hi, values_[f]);
      }
    if (!(hi >= lo)) throw std::runtime_error("GridFunction::osc: no defined nodes");
    return hi - lo;
  }

  /// Multilinear interpolation; empty when x leaves the lattice or touches an
  /// undefined corner.
  std::optional<double> interpolate(const Vec& x) const {
    const Grid& g = *grid_;
    const int n = g.dim();
    int base[4];
    double t[4];
    for (int i = 0; i < n; ++i) {
      const double s = (x[i] + g.radius()) / g.spacing();
      double fl = std::floor(s);
      if (fl < 0.0 || fl > g.nodes_per_axis() - 1) return std::nullopt;
      if (fl == g.nodes_per_axis() - 1) fl -= 1.0;  // right edge
      base[i] = static_cast<int>(fl);
      if (base[i] > g.nodes_per_axis() - 2) return std::nullopt;
      t[i] = s - fl;
      if (t[i] < -1e-12 || t[i] > 1.0 + 1e-12) return std::nullopt;
    }
    double acc = 0.0;
    const int corners = 1 << n;
    for (int c = 0; c < corners; ++c) {
      int m[4];
      double wgt = 1.0;
      for (int i = 0; i < n; ++i) {
        const int bit = (c >> i) & 1;
        m[i] = base[i] + bit;
        wgt *= bit ? t[i] : 1.0 - t[i];
      }
      const std::size_t f = g.to_flat(m);
      if (!defined_[f]) {
        if (wgt > 1e-12) return std::nullopt;
        continue;  // zero-weight corner may be undefined
      }
      acc += wgt * values_[f];
    }
    return acc;
  }

 private:
  GridPtr grid_;
  std::vector<double> values_;
  std::vector<std::uint8_t> defined_;
  std::vector<double> cut_values_;
};

/// Samples a field at every non-exterior lattice node and at all cut points.
inline GridFunction sample_field(GridPtr grid, const ScalarField& f) {
  if (f.dim() != grid->dim()) throw std::invalid_argument("sample_field: dimension mismatch");
  GridFunction u(grid);
  for (std::size_t fl = 0; fl < grid->node_count(); ++fl)
    if (grid->cls(fl) != NodeClass::kExterior) u.set(fl, f.value(grid->coord(fl)));
  for (std::size_t id = 0; id < grid->cut_count(); ++id)
    u.set_cut_value(id, f.value(grid->cut_point(id)));
  return u;
}

namespace detail {

/// Second difference of u along a grid line at an interior node:
/// 2/(s+ + s-) [ (u+ - u0)/s+ + (u- - u0)/s- ], exact on quadratics.
inline double line_second_difference(const GridFunction& u, std::size_t flat, int l) {
  const Grid& g = u.grid();
  const double u0 = u.value(flat);
  double uv[2], sv[2];
  for (int dir = 0; dir < 2; ++dir) {
    const Grid::Arm a = g.arm(flat, l, dir);
    if (a.lattice) {
      if (!u.defined(a.nbr))
        throw BoundaryProximityError("line_second_difference: undefined neighbor value", flat);
      uv[dir] = u.value(a.nbr);
    } else {
      uv[dir] = u.cut_value(static_cast<std::size_t>(a.cut));
    }
    sv[dir] = a.s;
  }
  return 2.0 / (sv[0] + sv[1]) * ((uv[0] - u0) / sv[0] + (uv[1] - u0) / sv[1]);
}

}  // namespace detail

/// Discrete Hessian at an interior node. Diagonal entries come from axis
/// second differences; the (i, j) entry from the pair of diagonal lines,
/// H_ij = (D_{e_i + e_j} - D_{e_i - e_j}) / 4, which collapses to the usual
/// four-point cross on a uniform interior stencil.
inline SymmetricMatrix discrete_hessian(const GridFunction& u, std::size_t flat) {
  const Grid& g = u.grid();
  if (g.cls(flat) != NodeClass::kInterior)
    throw BoundaryProximityError("discrete_hessian: node is not interior", flat);
  const int n = g.dim();
  SymmetricMatrix h(n);
  for (int l = 0; l < g.line_count(); ++l) {
    const Grid::Line& ln = g.line(l);
    const double d = detail::line_second_difference(u, flat, l);
    if (ln.j < 0) {
      h.set(ln.i, ln.i, d);
    } else if (ln.sign > 0) {
      h.add(ln.i, ln.j, d / 4.0);
    } else {
      h.add(ln.i, ln.j, -d / 4.0);
    }
  }
  return h;
}

}  // namespace hessianlab
