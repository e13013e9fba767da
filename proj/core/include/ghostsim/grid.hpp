#pragma once
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "ghostsim/error.hpp"

namespace ghostsim {

using Complex = std::complex<double>;

/// Square sampling grid with the origin pinned to index (n/2, n/2).
///
/// The coordinate of pixel (i, j) is ((i - n/2) * pitch, (j - n/2) * pitch),
/// so the point reflection x -> -x is the exact index permutation
/// (i, j) -> ((n - i) % n, (n - j) % n). Parity operations on grids are
/// therefore lossless: no interpolation is ever involved.
struct GridSpec {
  int n = 0;        ///< pixels per side; even, >= 16
  double pitch = 0; ///< physical length per pixel (meters)

  GridSpec() = default;
  GridSpec(int n_, double pitch_) : n(n_), pitch(pitch_) { validate(); }

  void validate() const {
    if (n < 16 || n % 2 != 0)
      throw ConfigError("grid: n must be even and >= 16, got " + std::to_string(n));
    if (!(pitch > 0.0))
      throw ConfigError("grid: pitch must be > 0");
  }

  double coord(int i) const { return (i - n / 2) * pitch; }
  int reflect_index(int i) const { return i == 0 ? 0 : n - i; }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * n + j;
  }
  std::size_t size() const { return static_cast<std::size_t>(n) * n; }

  bool operator==(const GridSpec& o) const { return n == o.n && pitch == o.pitch; }
};

/// Real-valued grid sample (phases, transmittances, rate maps).
struct RealGrid {
  GridSpec spec;
  std::vector<double> v;

  RealGrid() = default;
  explicit RealGrid(const GridSpec& s, double fill = 0.0)
      : spec(s), v(s.size(), fill) {}

  double& at(int i, int j) { return v[spec.index(i, j)]; }
  double at(int i, int j) const { return v[spec.index(i, j)]; }
};

/// Sampled 2D complex amplitude; the universal carrier for masks and
/// momentum-space functions.
struct ComplexField {
  GridSpec spec;
  std::vector<Complex> v;

  ComplexField() = default;
  explicit ComplexField(const GridSpec& s, Complex fill = {0.0, 0.0})
      : spec(s), v(s.size(), fill) {}

  Complex& at(int i, int j) { return v[spec.index(i, j)]; }
  Complex at(int i, int j) const { return v[spec.index(i, j)]; }
};

/// Point reflection x -> -x as the exact grid permutation. An involution.
ComplexField reflect(const ComplexField& f);
RealGrid reflect(const RealGrid& g);

/// Split a grid into even and odd parts under the grid reflection:
/// even(x) = (phi(x) + phi(-x)) / 2, odd = phi - even.
/// The odd part is computed as the remainder so that even + odd
/// reassembles phi without error; even-of-even and odd-of-even are exact.
std::pair<RealGrid, RealGrid> decompose_parity(const RealGrid& phi);

/// True when every sample is finite (no NaN or Inf).
bool all_finite(const RealGrid& g);
bool all_finite(const ComplexField& f);

}  // namespace ghostsim
