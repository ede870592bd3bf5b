// Prints the manufactured-solution convergence table for the planar solver:
// exact solution 0.5 |x|^2 + 0.25 |x|^4 on the unit disk.

#include <cmath>
#include <cstdio>

#include "hessianlab/dirichlet.hpp"

using hessianlab::Vec;

int main() {
  const auto exact = [](const Vec& x) {
    const double r2 = x.squaredNorm();
    return 0.5 * r2 + 0.25 * r2 * r2;
  };

  std::printf("%5s %12s %10s %8s %6s\n", "res", "sup error", "residual", "order", "iters");
  double prev = 0.0;
  for (const int res : {16, 32, 64, 128}) {
    hessianlab::DirichletProblem p;
    p.n = 2;
    p.k = 2;
    p.rhs = std::make_shared<const hessianlab::CallableField>(2, [](const Vec& x) {
      const double r2 = x.squaredNorm();
      return (1.0 + r2) * (1.0 + 3.0 * r2);
    });
    p.boundary = std::make_shared<const hessianlab::CallableField>(2, exact);
    const auto [u, rep] = hessianlab::solve_dirichlet(p, res);

    const auto& g = u.grid();
    double sup = 0.0;
    for (std::size_t f = 0; f < g.node_count(); ++f)
      if (u.defined(f)) sup = std::max(sup, std::abs(u.value(f) - exact(g.coord(f))));

    if (prev > 0.0)
      std::printf("%5d %12.3e %10.2e %8.2f %6d\n", res, sup, rep.residual, std::log2(prev / sup),
                  rep.iterations);
    else
      std::printf("%5d %12.3e %10.2e %8s %6d\n", res, sup, rep.residual, "-", rep.iterations);
    prev = sup;
  }
  return 0;
}
