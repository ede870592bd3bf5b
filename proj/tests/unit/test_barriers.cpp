#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "hessianlab/barriers.hpp"
#include "hessianlab/sigma.hpp"
#include "support/oracles.hpp"

using hessianlab::QuadraticForm;
using hessianlab::SymmetricMatrix;
using hessianlab::Vec;

namespace {

Vec point3(double a, double b, double c) {
  Vec x(3);
  x << a, b, c;
  return x;
}

}  // namespace

TEST_CASE("cylinder barrier closed form at h=0.1, H=1, n=3") {
  const QuadraticForm p = hessianlab::make_cylinder_barrier(0.1, 1.0, 3);
  CHECK(p.value(point3(0, 0, 0)) == Catch::Approx(0.1));
  CHECK(p.value(point3(0, 0, 0.5)) == Catch::Approx(0.0).margin(1e-15));  // center of the cylinder
  CHECK(p.value(point3(1, 0, 0.5)) == Catch::Approx(0.1));                // lateral wall, mid-height
  CHECK(p.value(point3(0, 0, 1.0)) == Catch::Approx(0.1));                // top cap center

  const SymmetricMatrix h = p.hessian();
  CHECK(h(0, 0) == Catch::Approx(0.2));
  CHECK(h(1, 1) == Catch::Approx(0.2));
  CHECK(h(2, 2) == Catch::Approx(0.8));
  CHECK(h(0, 1) == 0.0);

  CHECK(hessianlab::barrier_sigma2_value(0.1, 1.0, 3) == Catch::Approx(0.36));
  CHECK(hessianlab::sigma_k(h, 2) == Catch::Approx(0.36));
}

TEST_CASE("cylinder barrier sigma_2 has no pure-quadratic term in the plane case") {
  // n = 2 leaves only the cross term 16 h^2 / H^2.
  const double h = 0.37, H = 1.6;
  CHECK(hessianlab::barrier_sigma2_value(h, H, 2) ==
        Catch::Approx(16.0 * h * h / (H * H)));
  const QuadraticForm p = hessianlab::make_cylinder_barrier(h, H, 2);
  CHECK(hessianlab::sigma_k(p.hessian(), 2) ==
        Catch::Approx(hessianlab::barrier_sigma2_value(h, H, 2)));
}

TEST_CASE("closed form matches the minor expansion for random h, H, n") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> hd(1e-3, 2.0), Hd(0.05, 4.0);
  for (int n = 2; n <= 6; ++n)
    for (int trial = 0; trial < 100; ++trial) {
      const double h = hd(rng), H = Hd(rng);
      const QuadraticForm p = hessianlab::make_cylinder_barrier(h, H, n);
      const double closed = hessianlab::barrier_sigma2_value(h, H, n);
      CHECK(oracles::close_rel(hessianlab::sigma_k(p.hessian(), 2), closed, 1e-12));
    }
}

TEST_CASE("h_star keeps sigma_2 strictly below one") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> Hd(0.05, 4.0), frac(0.0, 1.0);
  for (int n = 2; n <= 6; ++n)
    for (int trial = 0; trial < 100; ++trial) {
      const double H = Hd(rng);
      const double hs = hessianlab::h_star(n, H);
      CHECK(hessianlab::barrier_sigma2_value(hs, H, n) < 1.0);
      const double h = hs * std::max(frac(rng), 1e-6);
      CHECK(hessianlab::barrier_sigma2_value(h, H, n) < 1.0);
    }
}

TEST_CASE("barrier vanishes only from small h: sigma_2 -> 0 with h") {
  for (double h : {1e-2, 1e-4, 1e-6})
    CHECK(hessianlab::barrier_sigma2_value(h, 1.0, 4) < 100.0 * h * h);
}

TEST_CASE("sliding comparison function w_delta") {
  const QuadraticForm w = hessianlab::make_wdelta(1.0, 4);
  const SymmetricMatrix h = w.hessian();
  CHECK(h(0, 0) == 8.0);
  CHECK(h(1, 1) == 8.0);
  CHECK(h(2, 2) == -2.0);
  CHECK(h(3, 3) == -2.0);
  CHECK(hessianlab::sigma_k(h, 1) == Catch::Approx(12.0));
  CHECK(hessianlab::sigma_k(h, 2) == Catch::Approx(4.0));

  // Dimension 3 sits exactly on the cone boundary: sigma_2 = 0.
  const QuadraticForm w3 = hessianlab::make_wdelta(0.7, 3);
  CHECK(hessianlab::sigma_k(w3.hessian(), 2) == Catch::Approx(0.0).margin(1e-14));
  const auto rep = hessianlab::cone_membership(w3.hessian(), 2);
  CHECK(rep.in_closure);
  CHECK_FALSE(rep.in_open_cone);

  CHECK_THROWS_AS(hessianlab::make_wdelta(0.5, 2), std::invalid_argument);
}

TEST_CASE("w_delta closed-cone membership and sigma_2 identity, random delta") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> dd(1e-4, 10.0);
  for (int n = 3; n <= 8; ++n)
    for (int trial = 0; trial < 100; ++trial) {
      const double delta = dd(rng);
      const QuadraticForm w = hessianlab::make_wdelta(delta, n);
      const auto rep = hessianlab::cone_membership(w.hessian(), 2, hessianlab::ConeMode::kClosed);
      CHECK(rep.in_closure);
      CHECK(rep.sigmas[0] == Catch::Approx(6.0 * delta * (n - 2)));
      const double want = 2.0 * delta * delta * (n - 2) * (n - 3);
      CHECK(oracles::close_rel(rep.sigmas[1], want, 1e-12));
    }
}

TEST_CASE("wall barrier lifts the saddle by delta / 8") {
  const QuadraticForm w = hessianlab::make_wall_barrier(0.2, 3);
  CHECK(w.value(point3(0, 0, 0)) == Catch::Approx(0.025));
  // On the ring |y| = 1/6, z = 0: delta (2 (n-2) / 36 + 1/8).
  CHECK(w.value(point3(1.0 / 6.0, 0, 0)) == Catch::Approx(0.2 * (2.0 / 36.0 + 0.125)));
  CHECK(w.hessian() == hessianlab::make_wdelta(0.2, 3).hessian());
}

TEST_CASE("quadratic forms expose consistent derivatives") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const SymmetricMatrix a = oracles::random_symmetric(rng, n, 1.5);
    Vec b(n), x(n);
    for (int i = 0; i < n; ++i) {
      b[i] = d(rng);
      x[i] = d(rng);
    }
    const QuadraticForm q(a, b, d(rng));
    const Vec g = q.gradient(x);
    for (int i = 0; i < n; ++i) {
      const double fd = oracles::central_difference([&](double t) {
        Vec p = x;
        p[i] += t;
        return q.value(p);
      });
      CHECK(oracles::close_rel(g[i], fd, 1e-6));
    }
  }
}

TEST_CASE("barrier dominates h on the cylinder boundary with equality on the wall") {
  const double h = 0.05, H = 0.7;
  const QuadraticForm p = hessianlab::make_cylinder_barrier(h, H, 3);
  double min_boundary = 1e300;
  // Lateral wall samples.
  for (int a = 0; a < 64; ++a)
    for (int t = 0; t <= 32; ++t) {
      const double ang = 2.0 * M_PI * a / 64;
      const Vec x = point3(std::cos(ang), std::sin(ang), H * t / 32.0);
      min_boundary = std::min(min_boundary, p.value(x));
    }
  // Caps.
  for (int r = 0; r <= 8; ++r)
    for (int a = 0; a < 16; ++a)
      for (double z : {0.0, H}) {
        const double ang = 2.0 * M_PI * a / 16;
        const double rad = r / 8.0;
        min_boundary = std::min(min_boundary, p.value(point3(rad * std::cos(ang), rad * std::sin(ang), z)));
      }
  CHECK(min_boundary == Catch::Approx(h));
}
