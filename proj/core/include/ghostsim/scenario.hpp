#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ghostsim/geometry.hpp"
#include "ghostsim/imaging.hpp"
#include "ghostsim/mask.hpp"
#include "ghostsim/sources.hpp"

namespace ghostsim {

/// How a mask is produced: a named generator or an external file.
struct MaskSpec {
  enum class Kind { unit, pinhole, disk, slit, glyph, letter, pgm };
  Kind kind = Kind::unit;
  double param = 0;           ///< disk radius, slit width, glyph height (m)
  std::string path;           ///< amplitude PGM for letter/pgm
  PhaseScreen screen;         ///< explicit (mode, weight) pairs
  int random_modes = 0;       ///< > 0: add a seeded random screen
  double random_max_weight = 0;
  std::string phase_raw;      ///< optional raw float64 phase grid
};

struct SourceSpec {
  SourceKind kind = SourceKind::spdc;
  SpdcParams spdc;
  enum class ClassicalKind { uniform, gaussian, file };
  ClassicalKind classical_kind = ClassicalKind::uniform;
  double sigma_q = 0;
  std::string f_path;
};

enum class ExperimentType { image, interfere, correlate, lens_study };

struct AssertionSpec {
  std::string metric;
  double bound = 0;  ///< run passes when metric <= bound
};

/// A parsed scenario file. The schema is documented in docs/scenario_format.md.
struct Scenario {
  GridSpec grid;
  OpticalGeometry geometry;
  SourceSpec source;
  MaskSpec mask1, mask2;
  ExperimentType experiment = ExperimentType::image;
  std::uint64_t seed = 0;

  std::string image_path = "both";  ///< analytic | bruteforce | both
  LensMode branch1 = LensMode::with_lens;
  LensMode branch2 = LensMode::with_lens;

  double tau_min = 0, tau_max = 0;
  int tau_steps = 101;

  int rmax_px = 8, rsteps = 4;
  bool deinvert = false;

  std::vector<AssertionSpec> assertions;

  std::string base_dir;          ///< directory of the scenario file
  std::uint64_t scenario_hash = 0;  ///< FNV-1a of the file bytes
};

Scenario parse_scenario_file(const std::string& path);
Scenario parse_scenario_text(const std::string& text, const std::string& base_dir = ".");

/// Instantiates a mask, applying explicit screens, seeded random screens,
/// and raw phase files. Relative paths resolve against `base_dir`.
ObjectMask realize_mask(const MaskSpec& ms, const GridSpec& grid,
                        std::uint64_t seed, const std::string& base_dir);

/// Instantiates the classical momentum spectrum for the scenario grids.
ClassicalSpectrum realize_classical(const SourceSpec& src, const GridSpec& grid,
                                    const OpticalGeometry& geom,
                                    const std::string& base_dir);

/// Seeded screen over the full named-mode catalog (mixed parity), weights
/// uniform in [-max_weight, max_weight]. The generator is fixed independent
/// of platform so artifacts reproduce bit-for-bit.
PhaseScreen random_screen(std::uint64_t seed, double max_weight);

}  // namespace ghostsim
