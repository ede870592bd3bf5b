// End-to-end falsification walk-through: samples one-directional ridge data,
// runs the flat-set audit, and turns the offending sample into a touching
// quadratic whose operator value sits strictly below the right-hand side.

#include <cstdio>

#include "hessianlab/audits.hpp"
#include "hessianlab/grid_function.hpp"

using hessianlab::Vec;

int main() {
  const int n = 3, res = 32;
  const auto g = std::make_shared<const hessianlab::Grid>(
      n, hessianlab::Domain{hessianlab::DomainKind::kBox, 1.0}, res);
  const hessianlab::CallableField ridge(n, [](const Vec& x) { return x[2] * x[2]; });
  const auto u = hessianlab::sample_field(g, ridge);

  const auto audit = hessianlab::strict_2convexity_audit(u, {g->nearest_node(Vec::Zero(n))});
  std::printf("audit: %s, %zu offender(s)\n", audit.passed ? "PASS" : "FAIL",
              audit.offenders.size());
  for (const auto& scan : audit.scans)
    std::printf("  delta %.2e  flat-set size %zu  fitted dimension %d\n", scan.delta,
                scan.set_size, scan.dimension);
  if (audit.passed) return 0;

  const auto& off = audit.offenders[0];
  const auto search = hessianlab::theorem1_certificate(u, off.plane, off.frame);
  if (!search.found()) {
    std::printf("no certificate found (%zu attempts)\n", search.landscape.size());
    return 1;
  }
  const auto& cert = *search.certificate;
  std::printf("certificate after %zu attempts:\n", search.landscape.size());
  std::printf("  cylinder height %.4f  radius %.4f  profile height %.6f  slope %.4f\n",
              cert.height, cert.rho, cert.h, cert.slope);
  std::printf("  margin boundary    %.6e\n", cert.margin_boundary);
  std::printf("  margin center      %.6e\n", cert.margin_center);
  std::printf("  margin ellipticity %.6e\n", cert.margin_ellipticity);

  const double radius = std::max(cert.touch_radius, 1.01 * g->spacing());
  const auto touch = hessianlab::viscosity_touch_test(u, cert.touching, cert.touch_node,
                                                      hessianlab::TouchSense::kAbove, 1.0, 2,
                                                      radius);
  std::printf("touch test: touching=%d applicable=%d sigma_2 = %.6f < 1 => inequality %s\n",
              int(touch.touching), int(touch.applicable), touch.sigma_value,
              touch.inequality_holds ? "holds" : "fails");
  return 0;
}
