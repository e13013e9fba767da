#include "ghostsim/interferometer.hpp"

#include <cmath>

#include "ghostsim/threading.hpp"

namespace ghostsim {

double triangular(double x) {
  const double a = std::abs(x);
  return a <= 1.0 ? 1.0 - a : 0.0;
}

namespace {

void check_shared_spec(const ObjectMask& g1, const ObjectMask& g2) {
  if (!(g1.spec() == g2.spec()))
    throw ConfigError("interferometer: masks must share a GridSpec");
}

}  // namespace

double background_r0(const ObjectMask& g1, const ObjectMask& g2,
                     const OpticalGeometry& geom) {
  check_shared_spec(g1, g2);
  geom.validate();
  const GridSpec& spec = g1.spec();
  const GridSpec qgrid = geom.momentum_grid(spec);
  const double dq2 = qgrid.pitch * qgrid.pitch;

  // x = f q / k is pixel-exact: q bin (i, j) reads mask pixel (i, j) for G1
  // and the reflected pixel for G2.
  const RealGrid w1 = g1.intensity();
  const RealGrid w2 = g2.intensity();
  double sum = 0.0;
  for (int i = 0; i < spec.n; ++i) {
    const int ri = spec.reflect_index(i);
    for (int j = 0; j < spec.n; ++j) {
      sum += w1.at(i, j) * w2.at(ri, spec.reflect_index(j));
    }
  }
  return sum * dq2;
}

Complex modulation_w(double tau, const ObjectMask& g1, const ObjectMask& g2,
                     const SpdcParams& p, const OpticalGeometry& geom) {
  check_shared_spec(g1, g2);
  p.validate();
  const double r0 = background_r0(g1, g2, geom);
  if (r0 == 0.0)
    throw PhysicsError("modulation undefined: background rate R0 = 0");

  const GridSpec& spec = g1.spec();
  const GridSpec qgrid = geom.momentum_grid(spec);
  const double dq2 = qgrid.pitch * qgrid.pitch;
  const ComplexField f1 = g1.as_complex();
  const ComplexField f2 = g2.as_complex();
  const double alpha = 2.0 * p.walkoff * tau / p.group_delay;

  Complex sum = 0.0;
  for (int i = 0; i < spec.n; ++i) {
    const int ri = spec.reflect_index(i);
    for (int j = 0; j < spec.n; ++j) {
      const int rj = spec.reflect_index(j);
      const double qy = qgrid.coord(j);
      const Complex carrier(std::cos(alpha * qy), -std::sin(alpha * qy));
      sum += carrier * std::conj(f1.at(i, j)) * f1.at(ri, rj) *
             std::conj(f2.at(ri, rj)) * f2.at(i, j);
    }
  }
  return sum * dq2 / r0;
}

TauScan rate_scan(const std::vector<double>& taus, const ObjectMask& g1,
                  const ObjectMask& g2, const SpdcParams& p,
                  const OpticalGeometry& geom, int threads) {
  for (double tau : taus) {
    if (!std::isfinite(tau)) throw ConfigError("rate_scan: non-finite tau");
  }
  TauScan scan;
  scan.taus = taus;
  scan.params = p;
  scan.mask1 = g1;
  scan.mask2 = g2;
  scan.r0 = background_r0(g1, g2, geom);
  if (scan.r0 == 0.0)
    throw PhysicsError("rate_scan: background rate R0 = 0");
  scan.rates.resize(taus.size());
  scan.w.resize(taus.size());

  const double dl = p.group_delay * p.crystal_length;
  parallel_blocks(static_cast<int>(taus.size()), effective_threads(threads),
                  [&](int begin, int end) {
                    for (int s = begin; s < end; ++s) {
                      const double tau = taus[s];
                      const double env = triangular(1.0 - 2.0 * tau / dl);
                      scan.w[s] = modulation_w(tau, g1, g2, p, geom);
                      // env = 0 gives R = r0 * (1 - 0) = r0 exactly.
                      scan.rates[s] = scan.r0 * (1.0 - env * scan.w[s].real());
                    }
                  });
  return scan;
}

}  // namespace ghostsim
