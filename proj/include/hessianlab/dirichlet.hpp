#pragma once

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <chrono>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "hessianlab/grid_function.hpp"
#include "hessianlab/parallel.hpp"
#include "hessianlab/sigma.hpp"

namespace hessianlab {

struct DirichletProblem {
  int n = 2;
  int k = 2;
  Domain domain{DomainKind::kBall, 1.0};
  FieldPtr rhs;       // f, required positive for k = 2
  FieldPtr boundary;  // g, evaluated on the exact domain boundary
};

struct SolveOptions {
  int max_sweeps = 200;
  double update_tol = 1e-9;       // sup-norm update stopping threshold
  int max_damping_level = 6;      // step scales 0.5^m, m = 0..6
  double linear_tol = 1e-12;      // iterative sub-solve tolerance
  std::size_t direct_limit = 4096;  // unknown count above which sub-solves go iterative
};

struct SolveReport {
  int iterations = 0;
  double residual = 0.0;  // sup |sigma_k(D^2_h u) - f|, recomputed on the final iterate
  long cone_violations = 0;
  double seconds = 0.0;
  bool converged = false;
  std::vector<double> residual_history;  // after each accepted sweep
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(std::string msg, SolveReport rep)
      : std::runtime_error(std::move(msg)), report(std::move(rep)) {}
  SolveReport report;
};

namespace detail {

inline SymmetricMatrix project_to_floor(const SymmetricMatrix& m, double floor, double* shift_out) {
  const auto ok = [&](double tau) {
    const SymmetricMatrix s = m.shifted(tau);
    return sigma_k(s, 1) > 0.0 && sigma_k(s, 2) >= floor;
  };
  if (shift_out) *shift_out = 0.0;
  if (ok(0.0)) return m;
  double lo = 0.0, hi = 1.0 + 2.0 * m.max_abs();
  while (!ok(hi)) hi *= 2.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  if (shift_out) *shift_out = hi;
  return m.shifted(hi);
}

}  // namespace detail

/// Smallest shift M + tau I into {sigma_1 > 0, sigma_2 >= tol_ell}.
///
/// On {sigma_1 > 0} the map tau -> sigma_2(M + tau I) is strictly increasing
/// (d sigma_2 / d tau = (n-1) sigma_1), so the admissible set is a half-line
/// and bisection to 1e-12 is sound. Returns M itself when already inside.
inline SymmetricMatrix project_to_cone(const SymmetricMatrix& m, double* shift_out = nullptr) {
  return detail::project_to_floor(m, tolerances::kEll, shift_out);
}

namespace detail {

/// Dirichlet data holder: boundary lattice nodes (boxes) and sphere cut
/// points (balls) carry g; interior values stay unset.
inline GridFunction boundary_data(const GridPtr& grid, const ScalarField& g) {
  GridFunction b(grid);
  for (std::size_t f = 0; f < grid->node_count(); ++f)
    if (grid->cls(f) == NodeClass::kBoundary) b.set(f, g.value(grid->coord(f)));
  for (std::size_t id = 0; id < grid->cut_count(); ++id)
    b.set_cut_value(id, g.value(grid->cut_point(id)));
  return b;
}

/// Solves trace(A(x) D^2 v) = rhs(x) over interior nodes, Dirichlet data in
/// `bdata`. Direct sparse LU with one refinement pass at moderate sizes,
/// ILUT-preconditioned BiCGSTAB beyond.
inline std::vector<double> solve_linear_elliptic(const GridPtr& grid,
                                                 const std::vector<SymmetricMatrix>& coefs,
                                                 const std::vector<double>& rhs,
                                                 const GridFunction& bdata,
                                                 const SolveOptions& opt,
                                                 const std::vector<double>* warm = nullptr) {
  const Grid& g = *grid;
  const auto& interior = g.interior_nodes();
  const std::size_t N = interior.size();
  if (coefs.size() != N || rhs.size() != N)
    throw std::invalid_argument("solve_linear_elliptic: field sizes do not match the interior");

  Eigen::VectorXd b(N);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(N * (2 * g.line_count() + 1));

  for (std::size_t d = 0; d < N; ++d) {
    const std::size_t f = interior[d];
    const SymmetricMatrix& A = coefs[d];
    double center = 0.0;
    b[d] = rhs[d];
    for (int l = 0; l < g.line_count(); ++l) {
      const Grid::Line& ln = g.line(l);
      const double c = ln.j < 0 ? A(ln.i, ln.i) : (ln.sign > 0 ? 0.5 : -0.5) * A(ln.i, ln.j);
      if (c == 0.0) continue;
      const Grid::Arm ap = g.arm(f, l, 0);
      const Grid::Arm am = g.arm(f, l, 1);
      const double wp = 2.0 / ((ap.s + am.s) * ap.s);
      const double wm = 2.0 / ((ap.s + am.s) * am.s);
      center -= c * 2.0 / (ap.s * am.s);
      const auto arm_term = [&](const Grid::Arm& a, double w) {
        if (a.lattice) {
          const std::int64_t col = g.interior_index(a.nbr);
          if (col >= 0)
            trip.emplace_back(static_cast<int>(d), static_cast<int>(col), c * w);
          else
            b[d] -= c * w * bdata.value(a.nbr);  // box boundary node
        } else {
          b[d] -= c * w * bdata.cut_value(static_cast<std::size_t>(a.cut));
        }
      };
      arm_term(ap, wp);
      arm_term(am, wm);
    }
    trip.emplace_back(static_cast<int>(d), static_cast<int>(d), center);
  }

  Eigen::SparseMatrix<double> M(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  M.setFromTriplets(trip.begin(), trip.end());
  M.makeCompressed();

  Eigen::VectorXd x;
  if (N <= opt.direct_limit) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(M);
    if (lu.info() != Eigen::Success)
      throw std::runtime_error("solve_linear_elliptic: factorization failed");
    x = lu.solve(b);
    // One refinement pass keeps the residual near machine precision.
    const Eigen::VectorXd r = b - M * x;
    x += lu.solve(r);
  } else {
    Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> it;
    it.preconditioner().setDroptol(1e-4);
    it.preconditioner().setFillfactor(12);
    it.setTolerance(opt.linear_tol);
    it.setMaxIterations(4000);
    it.compute(M);
    if (warm && warm->size() == N) {
      Eigen::VectorXd x0 = Eigen::Map<const Eigen::VectorXd>(warm->data(), static_cast<Eigen::Index>(N));
      x = it.solveWithGuess(b, x0);
    } else {
      x = it.solve(b);
    }
    if (it.info() != Eigen::Success)
      throw std::runtime_error("solve_linear_elliptic: iterative sub-solve stalled");
    // Refinement against the relative-tolerance floor: second differences of
    // the result amplify linear error by 1/spacing^2, so push the algebraic
    // residual to machine scale. The factorized preconditioner is reused.
    it.setTolerance(1e-8);
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXd r = b - M * x;
      if (r.lpNorm<Eigen::Infinity>() <= 1e-15 * (1.0 + b.lpNorm<Eigen::Infinity>())) break;
      const Eigen::VectorXd dx = it.solve(r);
      if (it.info() != Eigen::Success) break;
      x += dx;
    }
  }
  return std::vector<double>(x.data(), x.data() + N);
}

inline GridFunction with_interior(const GridFunction& bdata, const std::vector<double>& vals) {
  GridFunction u = bdata;
  const auto& interior = u.grid().interior_nodes();
  for (std::size_t d = 0; d < interior.size(); ++d) u.set(interior[d], vals[d]);
  return u;
}

inline double sup_residual(const GridFunction& u, int k, const std::vector<double>& f) {
  const Grid& g = u.grid();
  const auto& interior = g.interior_nodes();
  std::vector<double> local(interior.size());
  parallel_for(std::size_t{0}, interior.size(), [&](std::size_t d) {
    local[d] = std::abs(sigma_k(discrete_hessian(u, interior[d]), k) - f[d]);
  });
  double r = 0.0;
  for (double v : local) r = std::max(r, v);
  return r;
}

}  // namespace detail

/// Finite-difference Dirichlet solver for sigma_k(D^2 u) = f, k in {1, 2}.
///
/// k = 1 is one linear solve. k = 2 runs policy iteration on the concave
/// root F(M) = sigma_2(M)^{1/2}: each sweep freezes the PSD coefficient
/// field A(x) = F'(projected Hessian), solves the linear problem
/// trace(A D^2 v) = f^{1/2} - offset, and damps v into the iterate with the
/// largest step that does not increase the sup-norm residual.
inline std::pair<GridFunction, SolveReport> solve_dirichlet(const DirichletProblem& p, int resolution,
                                                            const SolveOptions& opt = {}) {
  if (p.k != 1 && p.k != 2) throw std::invalid_argument("solve_dirichlet: k must be 1 or 2");
  if (p.n < 2 || p.n > 3) throw std::invalid_argument("solve_dirichlet: n must be 2 or 3");
  if (!p.rhs || !p.boundary) throw std::invalid_argument("solve_dirichlet: missing rhs or boundary field");
  if (p.rhs->dim() != p.n || p.boundary->dim() != p.n)
    throw std::invalid_argument("solve_dirichlet: field dimension mismatch");
  if (resolution < 8) throw std::invalid_argument("solve_dirichlet: resolution below 8");

  const auto t0 = std::chrono::steady_clock::now();
  const GridPtr grid = std::make_shared<const Grid>(p.n, p.domain, resolution);
  const auto& interior = grid->interior_nodes();
  const std::size_t N = interior.size();
  const GridFunction bdata = detail::boundary_data(grid, *p.boundary);

  std::vector<double> f(N);
  double fmin = 1e300, fmax = -1e300;
  for (std::size_t d = 0; d < N; ++d) {
    f[d] = p.rhs->value(grid->coord(interior[d]));
    fmin = std::min(fmin, f[d]);
    fmax = std::max(fmax, f[d]);
  }
  if (p.k == 2 && !(fmin > 0.0))
    throw std::invalid_argument("solve_dirichlet: rhs must be strictly positive for k = 2");

  SolveReport rep;
  const auto finish = [&](GridFunction u, bool converged) {
    rep.residual = detail::sup_residual(u, p.k, f);
    rep.converged = converged;
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return std::make_pair(std::move(u), rep);
  };

  const std::vector<SymmetricMatrix> laplace_coefs(N, SymmetricMatrix::identity(p.n));

  if (p.k == 1) {
    const std::vector<double> v = detail::solve_linear_elliptic(grid, laplace_coefs, f, bdata, opt);
    rep.iterations = 1;
    auto out = finish(detail::with_interior(bdata, v), true);
    out.second.residual_history = {out.second.residual};
    return out;
  }

  // Initial iterate: Laplace-consistent profile sigma_2(c I) = f.
  const double pairs = 0.5 * p.n * (p.n - 1);
  std::vector<double> rhs0(N);
  for (std::size_t d = 0; d < N; ++d) rhs0[d] = p.n * std::sqrt(f[d] / pairs);
  std::vector<double> uvals = detail::solve_linear_elliptic(grid, laplace_coefs, rhs0, bdata, opt);
  GridFunction u = detail::with_interior(bdata, uvals);

  double res_cur = detail::sup_residual(u, 2, f);
  rep.residual_history.push_back(res_cur);
  const double floor = 1e-12 * (1.0 + std::abs(fmax));

  std::vector<SymmetricMatrix> coefs(N, SymmetricMatrix(p.n));
  std::vector<double> rhs(N);
  std::vector<long> shifted(N, 0);

  for (int sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
    parallel_for(std::size_t{0}, N, [&](std::size_t d) {
      double tau = 0.0;
      const SymmetricMatrix hess = discrete_hessian(u, interior[d]);
      project_to_cone(hess, &tau);
      if (tau > 0.0) shifted[d] += 1;
      // Linearize at a projection with an rhs-relative floor: the square
      // root has unbounded slope at the cone boundary, so supporting planes
      // taken there blow up and stall the damped steps. The floor is
      // inactive at any fixed point, where sigma_2 equals f.
      const SymmetricMatrix proj =
          detail::project_to_floor(hess, std::max(tolerances::kEll, 0.25 * f[d]), nullptr);
      const LinearOperator lin = support_linearization(proj);
      coefs[d] = lin.coefficient_matrix;
      rhs[d] = std::sqrt(f[d]) - lin.offset;
    });

    const std::vector<double> v = detail::solve_linear_elliptic(grid, coefs, rhs, bdata, opt, &uvals);

    // Damped acceptance: largest step with a non-increasing residual.
    bool accepted = false;
    double update = 0.0, res_new = res_cur;
    std::vector<double> cand(N);
    for (int m = 0; m <= opt.max_damping_level && !accepted; ++m) {
      const double step = std::ldexp(1.0, -m);
      double du = 0.0;
      for (std::size_t d = 0; d < N; ++d) {
        cand[d] = uvals[d] + step * (v[d] - uvals[d]);
        du = std::max(du, std::abs(cand[d] - uvals[d]));
      }
      const double res_try = detail::sup_residual(detail::with_interior(bdata, cand), 2, f);
      if (res_try <= res_cur * (1.0 + 1e-12) + 1e-15) {
        accepted = true;
        update = du;
        res_new = res_try;
        uvals.swap(cand);
      }
    }
    if (!accepted) break;  // policy step cannot improve the residual further

    u = detail::with_interior(bdata, uvals);
    res_cur = res_new;
    rep.residual_history.push_back(res_cur);
    rep.iterations = sweep;
    if (update < opt.update_tol || res_cur <= floor) {
      rep.cone_violations = 0;
      for (long s : shifted) rep.cone_violations += s;
      return finish(std::move(u), true);
    }
  }

  rep.cone_violations = 0;
  for (long s : shifted) rep.cone_violations += s;
  if (res_cur <= floor) return finish(std::move(u), true);
  auto out = finish(std::move(u), false);
  throw ConvergenceError("solve_dirichlet: policy iteration did not converge", out.second);
}

}  // namespace hessianlab
