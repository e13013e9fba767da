#pragma once
#include <vector>

#include "ghostsim/grid.hpp"

namespace ghostsim {

/// Type-II collinear SPDC crystal parameters.
struct SpdcParams {
  double crystal_length = 0;   ///< L (m)
  double group_delay = 0;      ///< D, inverse-group-velocity difference (s/m)
  double walkoff = 0;          ///< M, spatial walk-off along e2 (dimensionless)
  double k_pump = 0;           ///< pump wavenumber (1/m)
  double omega0 = 0;           ///< center frequency (rad/s)
  double bandwidth = 0;        ///< half-width of the detuning window (rad/s)
  int n_nu = 9;                ///< quadrature points for nu; odd so nu = 0 is a node

  void validate() const {
    if (!(crystal_length > 0) || !(k_pump > 0) || !(omega0 > 0) || !(bandwidth > 0))
      throw ConfigError("spdc: L, k_pump, omega0, bandwidth must be > 0");
    if (n_nu < 1 || n_nu % 2 == 0)
      throw ConfigError("spdc: n_nu must be odd and >= 1");
  }
};

/// One node of the detuning quadrature.
struct NuNode {
  double nu;
  double weight;
};

/// Symmetric trapezoid nodes over [-bandwidth, +bandwidth]. The node set is
/// exactly closed under nu -> -nu with equal weights, which makes the
/// pairing in the cross-spectral integral exact on the grid.
std::vector<NuNode> nu_quadrature(const SpdcParams& p);

/// Phase mismatch Delta(q, nu) = -nu D + M e2.q + 2 |q|^2 / k_pump  (1/m).
double phase_mismatch(double qx, double qy, double nu, const SpdcParams& p);

/// sinc with the removable singularity handled by a two-term Taylor branch
/// below |u| = 1e-4.
double sinc(double u);

/// Downconversion spectral amplitude
/// Phi(q, nu) = sinc(L Delta / 2) * exp(i L Delta / 2); |Phi| <= 1.
Complex spdc_spectrum(double qx, double qy, double nu, const SpdcParams& p);

/// Classical anticorrelated source: momentum spectrum F(q) sampled on the
/// momentum grid. A coincidence pairs (q in branch 1, -q in branch 2).
class ClassicalSpectrum {
 public:
  /// `expect_even` enforces F(-q) = F(q) to 1e-12 relative at construction.
  ClassicalSpectrum(ComplexField f, bool expect_even = true);

  static ClassicalSpectrum uniform(const GridSpec& momentum_grid);
  static ClassicalSpectrum gaussian(const GridSpec& momentum_grid, double sigma_q);

  const ComplexField& field() const { return f_; }
  bool even() const { return even_; }

  Complex pair_weight(int qi, int qj) const { return f_.at(qi, qj); }

 private:
  ComplexField f_;
  bool even_;
};

}  // namespace ghostsim
