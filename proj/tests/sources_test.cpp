#include <doctest.h>

#include <cmath>

#include "ghostsim/sources.hpp"

using namespace ghostsim;

namespace {

SpdcParams test_params(double walkoff = 0.0) {
  SpdcParams p;
  p.crystal_length = 1e-3;
  p.group_delay = 1e-10;
  p.walkoff = walkoff;
  p.k_pump = 2e7;
  p.omega0 = 3e15;
  p.bandwidth = 6e13;
  p.n_nu = 9;
  return p;
}

}  // namespace

TEST_CASE("spdc parameter validation") {
  SpdcParams p = test_params();
  p.n_nu = 8;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.n_nu = 9;
  p.crystal_length = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("nu quadrature is symmetric with nu = 0 as a node") {
  const SpdcParams p = test_params();
  const auto nodes = nu_quadrature(p);
  REQUIRE(nodes.size() == 9);
  CHECK(nodes[4].nu == 0.0);
  for (int k = 0; k < 4; ++k) {
    CHECK(nodes[k].nu == -nodes[8 - k].nu);
    CHECK(nodes[k].weight == nodes[8 - k].weight);
  }
  double total = 0;
  for (const auto& n : nodes) total += n.weight;
  CHECK(total == doctest::Approx(2 * p.bandwidth).epsilon(1e-12));

  SpdcParams single = p;
  single.n_nu = 1;
  const auto one = nu_quadrature(single);
  REQUIRE(one.size() == 1);
  CHECK(one[0].nu == 0.0);
  CHECK(one[0].weight == 2 * p.bandwidth);
}

TEST_CASE("phase mismatch matches its defining terms") {
  const SpdcParams p = test_params(0.3);

  CHECK(phase_mismatch(0, 0, 0, p) == 0.0);

  // q = 0: only the detuning term survives.
  const double nu = 3e13;
  CHECK(phase_mismatch(0, 0, nu, p) == -nu * p.group_delay);

  // q along e1 with nu = 0: walk-off couples only e2, leaving diffraction.
  const double q = 500.0;
  CHECK(phase_mismatch(q, 0, 0, p) == doctest::Approx(2 * q * q / p.k_pump).epsilon(1e-15));
  // q along e2 picks up the walk-off term.
  CHECK(phase_mismatch(0, q, 0, p) ==
        doctest::Approx(p.walkoff * q + 2 * q * q / p.k_pump).epsilon(1e-15));
}

TEST_CASE("spdc spectrum amplitude") {
  const SpdcParams p = test_params();

  SUBCASE("zero mismatch gives unity") {
    CHECK(spdc_spectrum(0, 0, 0, p) == Complex(1.0, 0.0));
  }

  SUBCASE("first sinc zero: L Delta / 2 = pi") {
    // Choose nu so that the half-argument is exactly pi.
    const double nu = -2.0 * M_PI / (p.crystal_length * p.group_delay);
    const Complex phi = spdc_spectrum(0, 0, nu, p);
    CHECK(std::abs(phi) <= 1e-15);
  }

  SUBCASE("|Phi| never exceeds one") {
    for (double nu : {-5e13, -1e13, 0.0, 7e12, 4.4e13})
      for (double q : {0.0, 100.0, 900.0})
        CHECK(std::abs(spdc_spectrum(q, q / 2, nu, p)) <= 1.0 + 1e-15);
  }

  SUBCASE("sinc branch is continuous at the crossover") {
    const double u = 1e-6;
    const double taylor = 1.0 - u * u / 6.0;
    CHECK(std::abs(sinc(u) - taylor) <= 1e-12 * std::abs(taylor));
    CHECK(std::abs(sinc(2e-4) - std::sin(2e-4) / 2e-4) <= 1e-15);
  }
}

TEST_CASE("classical spectrum evenness") {
  const GridSpec qgrid(32, 100.0);

  SUBCASE("gaussian is even and peaks at q = 0") {
    const ClassicalSpectrum s = ClassicalSpectrum::gaussian(qgrid, 800.0);
    CHECK(s.even());
    const int c = qgrid.n / 2;
    const double peak = std::abs(s.pair_weight(c, c));
    CHECK(peak == 1.0);
    for (int i = 0; i < qgrid.n; ++i)
      for (int j = 0; j < qgrid.n; ++j)
        CHECK(std::abs(s.pair_weight(i, j)) <= peak);
    CHECK(s.pair_weight(c + 5, c - 3) == s.pair_weight(c - 5, c + 3));
  }

  SUBCASE("odd data with the even flag is rejected at construction") {
    ComplexField f(qgrid, Complex(1.0, 0.0));
    f.at(3, 7) = 2.0;  // breaks F(-q) = F(q)
    CHECK_THROWS_AS(ClassicalSpectrum(std::move(f), true), PhysicsError);
  }

  SUBCASE("uniform spectrum is even everywhere") {
    const ClassicalSpectrum s = ClassicalSpectrum::uniform(qgrid);
    CHECK(s.even());
    CHECK(s.pair_weight(1, 30) == Complex(1.0, 0.0));
  }
}
