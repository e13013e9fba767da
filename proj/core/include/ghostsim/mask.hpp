#pragma once
#include <string>

#include "ghostsim/grid.hpp"
#include "ghostsim/phase_screen.hpp"

namespace ghostsim {

/// Thin-object modulation G(x) = t(x) * exp(i phi(x)) stored as separate
/// transmittance and phase grids. Dimensionless; all physical units live in
/// GridSpec and OpticalGeometry.
class ObjectMask {
 public:
  ObjectMask(RealGrid amplitude, RealGrid phase);
  explicit ObjectMask(RealGrid amplitude);

  const GridSpec& spec() const { return amplitude_.spec; }
  const RealGrid& amplitude() const { return amplitude_; }
  const RealGrid& phase() const { return phase_; }

  /// t * exp(i phi).
  ComplexField as_complex() const;

  /// |G|^2 = t^2; the only thing the analytic imaging paths ever read.
  RealGrid intensity() const;

  /// Returns a copy with the rendered screen added to the phase grid.
  ObjectMask with_screen(const PhaseScreen& screen) const;
  ObjectMask with_phase(const RealGrid& phi) const;

  /// Drops the phase grid; transmittance is kept as-is.
  ObjectMask phase_free() const;

  bool fully_opaque() const;

 private:
  RealGrid amplitude_;  ///< t(x), validated to [0, 1]
  RealGrid phase_;      ///< phi(x) in radians
};

/// Mask generators. Geometric predicates test pixel centers.
ObjectMask make_unit_mask(const GridSpec& spec);
ObjectMask make_disk_mask(const GridSpec& spec, double radius_m);
/// Transmitting band |x . e1| <= width/2, extended along e2.
ObjectMask make_slit_mask(const GridSpec& spec, double width_m);
/// Single open pixel at the grid origin.
ObjectMask make_pinhole_mask(const GridSpec& spec);
/// Blocky letter "F" occupying the central `height_m` of the grid; an
/// asymmetric test object with no reflection symmetry.
ObjectMask make_letter_f_mask(const GridSpec& spec, double height_m);

}  // namespace ghostsim
