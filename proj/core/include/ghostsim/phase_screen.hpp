#pragma once
#include <string>
#include <vector>

#include "ghostsim/grid.hpp"

namespace ghostsim {

/// One basis mode on the unit disk: radial degree `radial` and signed
/// azimuthal order `azimuthal` (positive = cosine branch, negative = sine,
/// zero = rotationally symmetric). Parity under the point reflection
/// x -> -x is (-1)^|azimuthal|.
struct ScreenMode {
  int radial = 0;
  int azimuthal = 0;

  bool even() const { return std::abs(azimuthal) % 2 == 0; }
};

/// Thin-object phase aberration expressed as weighted disk-polynomial modes.
///
/// Modes are scaled to the grid's inscribed circle (radius n/2 * pitch) and
/// render to zero outside it, which keeps the wrap rows of the reflection
/// permutation parity-consistent. Rendering evaluates each mode through
/// sign-symmetric Cartesian recurrences, so a screen built purely from even
/// modes satisfies phi(-x) = phi(x) bit-exactly, and purely odd screens
/// satisfy phi(-x) = -phi(x) bit-exactly.
struct PhaseScreen {
  std::vector<std::pair<ScreenMode, double>> coefficients;  ///< weight in radians

  void add(ScreenMode mode, double weight_rad) {
    coefficients.emplace_back(mode, weight_rad);
  }
  void add(const std::string& name, double weight_rad);

  bool pure_even() const;
  bool pure_odd() const;
  bool empty() const { return coefficients.empty(); }
};

/// Named aberrations: piston, tilt_x, tilt_y, defocus, astig, astig45,
/// coma_x, coma_y, trefoil, trefoil45, spherical.
/// Throws ConfigError for an unknown name.
ScreenMode screen_mode_by_name(const std::string& name);

/// Samples phi(x) = sum_i w_i Z_i(x / r_disk) on the grid, zero outside the
/// inscribed disk. Throws ConfigError for invalid mode indices.
RealGrid render_phase_screen(const PhaseScreen& screen, const GridSpec& spec);

/// Single-mode render (used by the parity oracles in the tests).
RealGrid render_mode(ScreenMode mode, double weight_rad, const GridSpec& spec);

}  // namespace ghostsim
