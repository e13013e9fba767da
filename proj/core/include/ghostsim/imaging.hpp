#pragma once
#include <cstdint>
#include <utility>
#include <vector>

#include "ghostsim/geometry.hpp"
#include "ghostsim/mask.hpp"
#include "ghostsim/sources.hpp"

namespace ghostsim {

enum class LensMode { with_lens, without_lens };
enum class ImagePath { analytic, bruteforce };
enum class SourceKind { spdc, classical };

/// Coincidence-rate map R(x1) on the detector-1 grid.
///
/// Analytic maps keep their physical scale and store the closed-form
/// normalization constant in `norm`; brute-force maps are normalized to
/// unit peak and store the raw peak in `norm`.
struct CoincidenceMap {
  GridSpec spec;
  RealGrid rates;
  double norm = 0;
  ImagePath path = ImagePath::analytic;
  SourceKind source = SourceKind::spdc;
  std::int64_t vignetted = 0;  ///< q bins mapped outside the detector grid

  RealGrid peak_normalized() const;
};

/// One detection branch: lens configuration, object mask, geometry.
struct BranchTransfer {
  LensMode mode = LensMode::with_lens;
  const ObjectMask* mask = nullptr;
  OpticalGeometry geom;
  double pupil_radius = std::numeric_limits<double>::infinity();
};

/// Branch transfer amplitude H(q, x) for the momentum bin (qi, qj) and
/// detector pixel (xi, xj), both on the locked grids of `branch.geom`.
///
/// without_lens: G(f q / k) exp(i q . x).
/// with_lens: unit-modulus quadratic phases times G(f q / k) times a
/// discrete delta that localizes the bin at x = f_D q / k (one pixel per
/// bin, amplitude n so that sum_x |H|^2 matches the lens-free case for unit
/// masks). The quadratic prefactors are retained in amplitudes but are
/// invisible to any modulus.
Complex transfer(const BranchTransfer& branch, int qi, int qj, int xi, int xj);

/// Detuning-integrated spectral weights (x1-independent constants for any
/// phase mismatch that is small against the detuning window; the validation
/// suite measures the spread rather than assuming it).
double b_integral(double qx, double qy, const SpdcParams& p);
Complex c_integral(double qx, double qy, const SpdcParams& p);

/// The closed-form map constant: 2 B(0) + 2 Re C(0).
double analytic_norm_constant(const SpdcParams& p);

struct BcSpread {
  double b_spread = 0;  ///< (max - min) / mean of B over the sample points
  double c_spread = 0;  ///< max |C - mean C| / |mean C|
  double b_mean = 0;
  Complex c_mean;
};

/// Evaluates B and C at the momentum bins conjugate to the given detector
/// pixels and reports their relative spreads.
BcSpread bc_constancy(const SpdcParams& p, const OpticalGeometry& geom,
                      const GridSpec& mask_spec,
                      const std::vector<std::pair<int, int>>& det_pixels);

/// Closed-form entangled image: R(x1) = R0 |G1(x1/m)|^2 |G2(-x1/m)|^2 with
/// m = f_D / f. Reads only the transmittance grids, so object phases cannot
/// enter by construction.
CoincidenceMap image_entangled_analytic(const ObjectMask& g1, const ObjectMask& g2,
                                        const SpdcParams& p,
                                        const OpticalGeometry& geom);

/// Quadrature of the detection amplitude: for each x1,
/// R = sum_nu sum_x2 | sum_q Phi(q,nu) H1(q,x1) H2(-q,x2) |^2,
/// with the time integrals realized as the symmetric detuning quadrature.
/// Result normalized to unit peak. Refuses configurations whose estimated
/// work exceeds the budget (ResourceError).
CoincidenceMap image_entangled_bruteforce(const ObjectMask& g1, const ObjectMask& g2,
                                          const SpdcParams& p,
                                          const OpticalGeometry& geom,
                                          LensMode branch1, LensMode branch2,
                                          int threads = 0);

/// Closed-form classical image: R(x1) = |F(k x1 / f_D) G1(x1/m) G2(-x1/m)|^2.
CoincidenceMap image_classical(const ObjectMask& g1, const ObjectMask& g2,
                               const ClassicalSpectrum& s,
                               const OpticalGeometry& geom);

/// Companion quadrature for the classical source: sums the detection
/// amplitude sum_q F(q) exp(i q.(x1-x2)) H1(q,x1) H2(-q,x2) over the bucket.
CoincidenceMap image_classical_bruteforce(const ObjectMask& g1, const ObjectMask& g2,
                                          const ClassicalSpectrum& s,
                                          const OpticalGeometry& geom,
                                          LensMode branch1, LensMode branch2,
                                          int threads = 0);

/// One sample of the bucket-bucket spatial correlator.
struct CorrelationSample {
  int di = 0, dj = 0;  ///< displacement in detector pixels
  double rx = 0, ry = 0;  ///< physical displacement (m)
  double g = 0;
};

/// Bucket-bucket correlator g(r) = scale * sum_x1 |G1((x1+r)/m)|^2 |G2(-x1/m)|^2.
/// Displacements are exact pixel offsets on the detector grid. With
/// `deinvert` the extra corrective lens is assumed and G2(-x) becomes G2(x).
/// A displacement that pushes the needed G1 samples off-grid where the G2
/// factor is nonzero raises PhysicsError (no implicit wraparound).
std::vector<CorrelationSample> correlate_scan(
    const ObjectMask& g1, const ObjectMask& g2,
    const std::vector<std::pair<int, int>>& displacements_px,
    const OpticalGeometry& geom, bool deinvert = false, double scale = 1.0);

/// Grid statistics used by runs and the validation suite.
double max_abs(const RealGrid& g);
/// max |a - b| / max |b|; returns 0 when both grids are identically zero.
double max_rel_diff(const RealGrid& a, const RealGrid& b);
/// Standard deviation over mean.
double coefficient_of_variation(const RealGrid& g);

}  // namespace ghostsim
