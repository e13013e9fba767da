#include <doctest.h>

#include <cmath>
#include <random>

#include "ghostsim/grid.hpp"

using namespace ghostsim;

namespace {

RealGrid random_grid(const GridSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  RealGrid g(spec);
  for (double& v : g.v) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    v = 4.0 * u - 2.0;
  }
  return g;
}

}  // namespace

TEST_CASE("grid spec validation") {
  CHECK_THROWS_AS(GridSpec(8, 1e-6), ConfigError);
  CHECK_THROWS_AS(GridSpec(17, 1e-6), ConfigError);
  CHECK_THROWS_AS(GridSpec(32, 0.0), ConfigError);
  const GridSpec s(32, 1e-6);
  CHECK(s.coord(16) == 0.0);
  CHECK(s.coord(15) == doctest::Approx(-1e-6));
  CHECK(s.reflect_index(0) == 0);
  CHECK(s.reflect_index(3) == 29);
}

TEST_CASE("reflect moves a delta to the mirrored pixel") {
  const GridSpec spec(32, 1.0);
  ComplexField f(spec);
  const int c = spec.n / 2;

  SUBCASE("center pixel is a fixed point") {
    f.at(c, c) = 1.0;
    const ComplexField r = reflect(f);
    CHECK(r.at(c, c) == Complex(1.0, 0.0));
  }

  SUBCASE("offset delta lands at the point-reflected pixel") {
    f.at(c + 3, c) = 1.0;
    const ComplexField r = reflect(f);
    CHECK(r.at(c - 3, c) == Complex(1.0, 0.0));
    CHECK(r.at(c + 3, c) == Complex(0.0, 0.0));
  }
}

TEST_CASE("reflect is an involution, bit-exactly") {
  const GridSpec spec(32, 1.0);
  ComplexField f(spec);
  std::mt19937_64 rng(7);
  for (Complex& z : f.v)
    z = Complex(static_cast<double>(rng() >> 11) * 0x1.0p-53,
                static_cast<double>(rng() >> 11) * 0x1.0p-53);
  const ComplexField rr = reflect(reflect(f));
  for (std::size_t k = 0; k < f.v.size(); ++k) CHECK(rr.v[k] == f.v[k]);
}

TEST_CASE("parity decomposition") {
  const GridSpec spec(32, 0.25);

  SUBCASE("|x|^2 is purely even") {
    RealGrid phi(spec);
    for (int i = 0; i < spec.n; ++i)
      for (int j = 0; j < spec.n; ++j) {
        const double x = spec.coord(i), y = spec.coord(j);
        phi.at(i, j) = x * x + y * y;
      }
    const auto [even, odd] = decompose_parity(phi);
    for (std::size_t k = 0; k < phi.v.size(); ++k) {
      CHECK(even.v[k] == phi.v[k]);
      CHECK(odd.v[k] == 0.0);
    }
  }

  SUBCASE("x^3 along one axis is purely odd away from the wrap row") {
    RealGrid phi(spec);
    for (int i = 0; i < spec.n; ++i)
      for (int j = 0; j < spec.n; ++j) {
        const double x = spec.coord(i);
        phi.at(i, j) = x * x * x;
      }
    const auto [even, odd] = decompose_parity(phi);
    for (int i = 1; i < spec.n; ++i)
      for (int j = 1; j < spec.n; ++j) {
        CHECK(even.at(i, j) == 0.0);
        CHECK(odd.at(i, j) == phi.at(i, j));
      }
  }

  SUBCASE("random grid recomposes with zero error") {
    const RealGrid phi = random_grid(spec, 99);
    const auto [even, odd] = decompose_parity(phi);
    double worst = 0;
    for (std::size_t k = 0; k < phi.v.size(); ++k)
      worst = std::max(worst, std::abs(even.v[k] + odd.v[k] - phi.v[k]));
    CHECK(worst == 0.0);
  }

  SUBCASE("decomposition is idempotent") {
    const RealGrid phi = random_grid(spec, 123);
    const auto [even, odd] = decompose_parity(phi);
    // The even part is symmetric bit-for-bit, so re-decomposing it is exact.
    const auto [ee, eo] = decompose_parity(even);
    std::size_t exact_failures = 0;
    for (std::size_t k = 0; k < phi.v.size(); ++k) {
      if (ee.v[k] != even.v[k]) ++exact_failures;
      if (eo.v[k] != 0.0) ++exact_failures;
    }
    CHECK(exact_failures == 0);
    // The odd remainder re-decomposes to itself up to one rounding of the
    // original sum.
    const auto [oe, oo] = decompose_parity(odd);
    for (std::size_t k = 0; k < phi.v.size(); ++k) {
      CHECK(std::abs(oe.v[k]) <= 4e-16 * std::abs(phi.v[k]));
      CHECK(std::abs(oo.v[k] - odd.v[k]) <= 4e-16 * std::abs(phi.v[k]));
    }
  }
}
