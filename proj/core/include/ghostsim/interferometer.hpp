#pragma once
#include <optional>
#include <vector>

#include "ghostsim/geometry.hpp"
#include "ghostsim/mask.hpp"
#include "ghostsim/sources.hpp"

namespace ghostsim {

/// Coincidence-rate scan R(tau) of the two-branch interferometer,
/// normalized so the large-|tau| baseline equals r0.
struct TauScan {
  std::vector<double> taus;   ///< delay values (s)
  std::vector<double> rates;  ///< R(tau)
  std::vector<Complex> w;     ///< modulation W(tau) per node
  double r0 = 0;              ///< background rate
  SpdcParams params;
  std::optional<ObjectMask> mask1, mask2;  ///< the scanned objects
};

/// Triangular envelope: 1 - |x| on [-1, 1], zero elsewhere.
double triangular(double x);

/// Background rate R0 = integral d2q |G1(f q / k) G2(-f q / k)|^2.
/// Depends only on the transmittances; all object phases drop out.
/// Returns 0 for fully opaque masks (the caller cannot normalize then).
double background_r0(const ObjectMask& g1, const ObjectMask& g2,
                     const OpticalGeometry& geom);

/// Modulation term
/// W(tau) = (1/R0) integral d2q exp(-2 i M tau / D e2.q)
///          G1*(fq/k) G1(-fq/k) G2*(-fq/k) G2(fq/k).
/// |W| <= 1. Even-parity object phases cancel from the integrand exactly;
/// odd-parity phases cancel only when G1 = G2.
/// Throws PhysicsError when R0 = 0.
Complex modulation_w(double tau, const ObjectMask& g1, const ObjectMask& g2,
                     const SpdcParams& p, const OpticalGeometry& geom);

/// R(tau) = R0 [1 - Lambda(1 - 2 tau / (D L)) Re W(tau)].
/// W enters through its real part, with the phase convention fixed by
/// requiring W = 1 at tau = D L / 2 for unit masks and M = 0; the dip is
/// centered there with full base width D L. Outside [0, DL] the envelope
/// vanishes and R equals R0 exactly.
TauScan rate_scan(const std::vector<double>& taus, const ObjectMask& g1,
                  const ObjectMask& g2, const SpdcParams& p,
                  const OpticalGeometry& geom, int threads = 0);

}  // namespace ghostsim
