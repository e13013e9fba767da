#pragma once
#include <limits>
#include <string>

#include "ghostsim/grid.hpp"

namespace ghostsim {

/// Focal lengths and distances of the two-branch 4f + detection-lens layout.
///
/// The three grids of a scenario are locked together by exact index maps:
/// the momentum grid has pitch_q = k * pitch / f (so the object coordinate
/// f q / k of a q bin is exactly a mask pixel), and the detector grid has
/// pitch m * pitch with m = f_D / f (so the localization x = f_D q / k of a
/// q bin is exactly a detector pixel). All reflection, magnification, and
/// cancellation statements then hold to machine precision.
struct OpticalGeometry {
  double f = 0;    ///< 4f focal length (m)
  double f_d = 0;  ///< detection-lens focal length (m)
  double d1 = 0;   ///< detection-lens conjugate distances (m)
  double d2 = 0;
  double k = 0;    ///< longitudinal wavenumber (1/m)
  double pupil_radius1 = std::numeric_limits<double>::infinity();
  double pupil_radius2 = std::numeric_limits<double>::infinity();

  void validate() const {
    if (!(f > 0) || !(f_d > 0) || !(k > 0))
      throw ConfigError("geometry: f, f_d, k must be > 0");
    if (!(pupil_radius1 > 0) || !(pupil_radius2 > 0))
      throw ConfigError("geometry: pupil radii must be > 0");
  }

  /// Image magnification m = f_D / f.
  double magnification() const { return f_d / f; }

  /// Momentum grid conjugate to the mask grid: x = f q / k is pixel-exact.
  GridSpec momentum_grid(const GridSpec& mask) const {
    return GridSpec(mask.n, k * mask.pitch / f);
  }

  /// Detector plane grid: x_det = m * x_mask is pixel-exact.
  GridSpec detector_grid(const GridSpec& mask) const {
    return GridSpec(mask.n, magnification() * mask.pitch);
  }
};

}  // namespace ghostsim
