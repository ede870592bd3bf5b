// Tour of the cylinder barrier: evaluates the operator on the barrier
// Hessian directly and against the closed form, then prints the height
// threshold below which the barrier is admissible.

#include <cstdio>

#include "hessianlab/barriers.hpp"
#include "hessianlab/sigma.hpp"

int main() {
  std::printf("%3s %6s %6s %14s %14s %12s\n", "n", "h", "H", "sigma2(D^2 P)", "closed form",
              "h*(n, H)");
  for (const int n : {2, 3, 4, 6}) {
    for (const double H : {0.5, 1.0, 2.0}) {
      const double h = 0.5 * hessianlab::h_star(n, H);
      const auto barrier = hessianlab::make_cylinder_barrier(h, H, n);
      const double direct = hessianlab::sigma_k(barrier.hessian(), 2);
      const double closed = hessianlab::barrier_sigma2_value(h, H, n);
      std::printf("%3d %6.4f %6.2f %14.10f %14.10f %12.6f\n", n, h, H, direct, closed,
                  hessianlab::h_star(n, H));
    }
  }

  std::printf("\ncomparison function w_delta, sigma_2 = 2 delta^2 (n-2)(n-3):\n");
  for (const int n : {3, 4, 5, 8}) {
    const auto w = hessianlab::make_wdelta(0.25, n);
    const double s = hessianlab::sigma_k(w.hessian(), 2);
    const auto cone = hessianlab::cone_membership(w.hessian(), 2, hessianlab::ConeMode::kClosed);
    std::printf("  n = %d  sigma_2 = %10.6f  closed cone: %s\n", n, s,
                cone.holds(hessianlab::ConeMode::kClosed) ? "yes" : "NO");
  }
  return 0;
}
