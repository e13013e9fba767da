#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "ghostsim/grid.hpp"

namespace ghostsim {

/// 16-bit binary PGM (P5, maxval 65535, big-endian samples).
///
/// Writers embed `comment` lines (one `#` line each) after the magic so
/// every emitted image carries the scenario hash and tool version.
void write_pgm16(const std::string& path, const RealGrid& values, double scale_max,
                 const std::vector<std::string>& comments = {});

struct Pgm16 {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> samples;  ///< row-major
};

Pgm16 read_pgm16(const std::string& path);

/// Mask amplitude from a 16-bit PGM: t = sample / 65535.
RealGrid read_amplitude_pgm(const std::string& path, double expected_pitch);

/// Raw 64-bit float grid (little-endian, row-major). The sidecar header
/// `<path>.hdr` is two `key = value` lines giving n and pitch.
void write_raw_grid(const std::string& path, const RealGrid& g);
RealGrid read_raw_grid(const std::string& path);

}  // namespace ghostsim
