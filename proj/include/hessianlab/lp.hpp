#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "hessianlab/scalar_field.hpp"

namespace hessianlab {

/// Dense list of half-space constraints a.z <= b in dimension dim, stored
/// row-major as [a_0 .. a_{dim-1}, b].
class ConstraintRows {
 public:
  explicit ConstraintRows(int dim) : dim_(dim) {}

  int dim() const { return dim_; }
  std::size_t size() const { return data_.size() / stride(); }

  void add(const double* a, double b) {
    data_.insert(data_.end(), a, a + dim_);
    data_.push_back(b);
  }

  const double* row(std::size_t r) const { return data_.data() + r * stride(); }
  double rhs(std::size_t r) const { return data_[r * stride() + dim_]; }
  void set_rhs(std::size_t r, double b) { data_[r * stride() + dim_] = b; }

  void reserve(std::size_t rows) { data_.reserve(rows * stride()); }

 private:
  std::size_t stride() const { return static_cast<std::size_t>(dim_) + 1; }
  int dim_;
  std::vector<double> data_;
};

struct LpResult {
  bool feasible = false;
  double value = 0.0;
  Vec z;
};

namespace detail {

constexpr double kLpTol = 1e-11;

inline double row_violation_scale(const double* a, double b, const Vec& z) {
  double s = 1.0 + std::abs(b);
  for (int i = 0; i < z.size(); ++i) s += std::abs(a[i] * z[i]);
  return s;
}

/// Recursive core: minimize c.z over the rows plus box lo <= z <= hi.
/// `order` lists row indices of `rows` to process; recursion re-shuffles its
/// prefix with `rng`, so results are deterministic for a fixed seed.
inline LpResult seidel_recurse(const ConstraintRows& rows, std::vector<std::uint32_t>& order,
                               const Vec& c, const Vec& lo, const Vec& hi, std::mt19937_64& rng) {
  const int d = static_cast<int>(c.size());

  if (d == 1) {
    double L = lo[0], U = hi[0];
    for (std::uint32_t r : order) {
      const double a = rows.row(r)[0], b = rows.rhs(r);
      const double scale = 1.0 + std::abs(b) + std::abs(a);
      if (std::abs(a) <= kLpTol * scale) {
        if (b < -kLpTol * scale) return {};  // 0 <= b fails
        continue;
      }
      if (a > 0.0)
        U = std::min(U, b / a);
      else
        L = std::max(L, b / a);
    }
    if (L > U + kLpTol * (1.0 + std::abs(L) + std::abs(U))) return {};
    LpResult res;
    res.feasible = true;
    res.z = Vec::Constant(1, c[0] > 0.0 ? L : (c[0] < 0.0 ? U : 0.5 * (L + U)));
    res.z[0] = std::min(std::max(res.z[0], L), U);
    res.value = c[0] * res.z[0];
    return res;
  }

  // Box optimum as the starting point.
  Vec z(d);
  for (int i = 0; i < d; ++i) z[i] = c[i] > 0.0 ? lo[i] : (c[i] < 0.0 ? hi[i] : 0.5 * (lo[i] + hi[i]));

  for (std::size_t idx = 0; idx < order.size(); ++idx) {
    const std::uint32_t r = order[idx];
    const double* a = rows.row(r);
    const double b = rows.rhs(r);
    double dot = 0.0;
    for (int i = 0; i < d; ++i) dot += a[i] * z[i];
    if (dot <= b + kLpTol * row_violation_scale(a, b, z)) continue;

    // Optimum moved to the hyperplane a.z = b. Eliminate the variable with
    // the largest pivot and recurse on the processed prefix.
    int k = 0;
    for (int i = 1; i < d; ++i)
      if (std::abs(a[i]) > std::abs(a[k])) k = i;
    const double piv = a[k];
    if (std::abs(piv) <= kLpTol * row_violation_scale(a, b, z)) {
      if (b < -kLpTol) return {};  // degenerate infeasible row
      continue;
    }

    ConstraintRows sub(d - 1);
    sub.reserve(idx + 2);
    std::vector<double> arow(static_cast<std::size_t>(d));
    auto project = [&](const double* s, double sb) {
      const double f = s[k] / piv;
      int t = 0;
      for (int i = 0; i < d; ++i)
        if (i != k) arow[t++] = s[i] - f * a[i];
      sub.add(arow.data(), sb - f * b);
    };
    for (std::size_t j = 0; j < idx; ++j) project(rows.row(order[j]), rows.rhs(order[j]));
    // Box bounds of the eliminated variable become general constraints via
    // the substitution z_k = (b - sum_{i != k} a_i z_i) / piv:
    //   z_k <= hi_k  ->  -sign(piv) a . z' <= sign(piv) (piv hi_k - b)
    //   z_k >= lo_k  ->   sign(piv) a . z' <= sign(piv) (b - piv lo_k)
    {
      const double sgn = piv > 0.0 ? 1.0 : -1.0;
      int t = 0;
      for (int i = 0; i < d; ++i)
        if (i != k) arow[t++] = -sgn * a[i];
      sub.add(arow.data(), sgn * (piv * hi[k] - b));
      t = 0;
      for (int i = 0; i < d; ++i)
        if (i != k) arow[t++] = sgn * a[i];
      sub.add(arow.data(), sgn * (b - piv * lo[k]));
    }

    Vec csub(d - 1), losub(d - 1), hisub(d - 1);
    {
      const double f = c[k] / piv;
      int t = 0;
      for (int i = 0; i < d; ++i)
        if (i != k) {
          csub[t] = c[i] - f * a[i];
          losub[t] = lo[i];
          hisub[t] = hi[i];
          ++t;
        }
    }

    std::vector<std::uint32_t> suborder(sub.size());
    std::iota(suborder.begin(), suborder.end(), 0u);
    std::shuffle(suborder.begin(), suborder.end(), rng);

    const LpResult inner = seidel_recurse(sub, suborder, csub, losub, hisub, rng);
    if (!inner.feasible) return {};

    int t = 0;
    double zk = b;
    for (int i = 0; i < d; ++i)
      if (i != k) {
        z[i] = inner.z[t++];
        zk -= a[i] * z[i];
      }
    z[k] = zk / piv;
  }

  LpResult res;
  res.feasible = true;
  res.z = z;
  res.value = c.dot(z);
  return res;
}

}  // namespace detail

/// Minimizes c.z subject to rows (a.z <= b) and the box lo <= z <= hi.
/// Seidel's randomized incremental method; the fixed seed makes runs
/// reproducible. Intended for dimensions <= 6 with many rows.
inline LpResult solve_lp(const ConstraintRows& rows, const Vec& c, const Vec& lo, const Vec& hi,
                         std::uint64_t seed = 0x5eed11ab) {
  if (c.size() != rows.dim() || lo.size() != c.size() || hi.size() != c.size())
    throw std::invalid_argument("solve_lp: dimension mismatch");
  for (int i = 0; i < c.size(); ++i)
    if (!(lo[i] <= hi[i])) throw std::invalid_argument("solve_lp: empty box");
  std::mt19937_64 rng(seed);
  std::vector<std::uint32_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0u);
  std::shuffle(order.begin(), order.end(), rng);
  return detail::seidel_recurse(rows, order, c, lo, hi, rng);
}

}  // namespace hessianlab
