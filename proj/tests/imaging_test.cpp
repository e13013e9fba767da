#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "ghostsim/imaging.hpp"
#include "ghostsim/scenario.hpp"

using namespace ghostsim;

namespace {

GridSpec test_grid(int n = 64) { return GridSpec(n, 1e-6); }

OpticalGeometry test_geometry(double magnification = 1.0) {
  OpticalGeometry g;
  g.f = 1.0;
  g.f_d = magnification;
  g.d1 = 1.0;
  g.d2 = 1.0;
  g.k = 1e7;
  return g;
}

SpdcParams test_params(int n_nu = 9) {
  SpdcParams p;
  p.crystal_length = 1e-3;
  p.group_delay = 1e-10;
  p.walkoff = 0.0;
  p.k_pump = 2e7;
  p.omega0 = 3e15;
  p.bandwidth = 6e13;
  p.n_nu = n_nu;
  return p;
}

RealGrid normalized(const RealGrid& g) {
  RealGrid out = g;
  const double peak = max_abs(out);
  if (peak > 0)
    for (double& v : out.v) v /= peak;
  return out;
}

/// H2(-q, x2) written out by hand: the mask and spectrum samples of -q use
/// the grid's reflection permutation, lens-free propagation keeps the
/// value-true phase exp(-i q . x2), and the detection lens localizes the bin
/// at the reflected detector pixel.
Complex h2_at(const ObjectMask& g2, const OpticalGeometry& geom, LensMode m2,
              int qi, int qj, int a, int b) {
  const GridSpec& spec = g2.spec();
  const GridSpec qgrid = geom.momentum_grid(spec);
  const GridSpec det = geom.detector_grid(spec);
  const int ri = spec.reflect_index(qi), rj = spec.reflect_index(qj);
  const Complex g = std::polar(g2.amplitude().at(ri, rj), g2.phase().at(ri, rj));
  const double x = det.coord(a), y = det.coord(b);
  if (m2 == LensMode::without_lens) {
    const double th = -(qgrid.coord(qi) * x + qgrid.coord(qj) * y);
    return g * Complex(std::cos(th), std::sin(th));
  }
  if (a != ri || b != rj) return {0, 0};
  const double qx = qgrid.coord(ri), qy = qgrid.coord(rj);
  const double cx = geom.k / (2.0 * geom.f_d) * (geom.d2 / geom.f_d - 1.0);
  const double cq = geom.d1 / (2.0 * geom.k);
  const double th = -cx * (x * x + y * y) - cq * (qx * qx + qy * qy);
  return Complex(std::cos(th), std::sin(th)) * g * static_cast<double>(spec.n);
}

/// Literal sum of the detection amplitude over the bucket and the momentum
/// grid: branch 1 through transfer(), branch 2 through the hand-written
/// H2(-q, x2) above. The production engines must agree.
double direct_rate(const ObjectMask& g1, const ObjectMask& g2, const SpdcParams& p,
                   const OpticalGeometry& geom, LensMode m1, LensMode m2,
                   int x1i, int x1j) {
  const GridSpec& spec = g1.spec();
  const int n = spec.n;
  const BranchTransfer b1{m1, &g1, geom, geom.pupil_radius1};
  const GridSpec qgrid = geom.momentum_grid(spec);
  const std::size_t n2 = static_cast<std::size_t>(n) * n;

  std::vector<Complex> h1(n2);
  for (int qi = 0; qi < n; ++qi)
    for (int qj = 0; qj < n; ++qj)
      h1[spec.index(qi, qj)] = transfer(b1, qi, qj, x1i, x1j);

  std::vector<Complex> h2(n2 * n2);
  for (int qi = 0; qi < n; ++qi)
    for (int qj = 0; qj < n; ++qj)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          h2[spec.index(qi, qj) * n2 + spec.index(a, b)] =
              h2_at(g2, geom, m2, qi, qj, a, b);

  double acc = 0;
  std::vector<Complex> phi(n2);
  for (const NuNode& node : nu_quadrature(p)) {
    for (int qi = 0; qi < n; ++qi)
      for (int qj = 0; qj < n; ++qj)
        phi[spec.index(qi, qj)] =
            spdc_spectrum(qgrid.coord(qi), qgrid.coord(qj), node.nu, p);
    for (std::size_t x2 = 0; x2 < n2; ++x2) {
      Complex amp = 0;
      for (std::size_t q = 0; q < n2; ++q) amp += phi[q] * h1[q] * h2[q * n2 + x2];
      acc += node.weight * std::norm(amp);
    }
  }
  return acc;
}

}  // namespace

TEST_CASE("transfer function") {
  const GridSpec grid = test_grid(32);
  const OpticalGeometry geom = test_geometry();
  const ObjectMask unit = make_unit_mask(grid);
  const int c = grid.n / 2;

  SUBCASE("with the lens, q = 0 is localized at x = 0") {
    const BranchTransfer b{LensMode::with_lens, &unit, geom, INFINITY};
    for (int xi = 0; xi < grid.n; ++xi)
      for (int xj = 0; xj < grid.n; ++xj) {
        const Complex h = transfer(b, c, c, xi, xj);
        if (xi == c && xj == c)
          CHECK(std::abs(h) == doctest::Approx(grid.n).epsilon(1e-12));
        else
          CHECK(h == Complex(0, 0));
      }
  }

  SUBCASE("without the lens, a unit mask gives unit modulus everywhere") {
    const BranchTransfer b{LensMode::without_lens, &unit, geom, INFINITY};
    for (int qi : {0, 5, c, 30})
      for (int xi : {0, 3, c, 31}) {
        const Complex h = transfer(b, qi, qi, xi, xi);
        CHECK(std::abs(h) == doctest::Approx(1.0).epsilon(1e-13));
      }
  }

  SUBCASE("the quadratic prefactors never reach any modulus") {
    OpticalGeometry other = geom;
    other.d1 = 3.7;
    other.d2 = 0.2;
    const BranchTransfer b1{LensMode::with_lens, &unit, geom, INFINITY};
    const BranchTransfer b2{LensMode::with_lens, &unit, other, INFINITY};
    for (int qi : {1, 7, c + 3}) {
      const Complex ha = transfer(b1, qi, qi, qi, qi);
      const Complex hb = transfer(b2, qi, qi, qi, qi);
      CHECK(std::abs(ha) == doctest::Approx(std::abs(hb)).epsilon(1e-13));
    }
  }

  SUBCASE("a finite pupil gates the detector pixel") {
    const BranchTransfer b{LensMode::without_lens, &unit, geom, 4e-6};
    CHECK(transfer(b, c, c, c, c) != Complex(0, 0));
    CHECK(transfer(b, c, c, c + 10, c) == Complex(0, 0));
  }

  SUBCASE("transfer at the reflected bin realizes H(-q, x) away from the wrap rows") {
    const ObjectMask letter = make_letter_f_mask(grid, 20e-6);
    for (int qi : {5, c, c + 7})
      for (int qj : {3, c - 2}) {
        const int ri = grid.reflect_index(qi), rj = grid.reflect_index(qj);
        const BranchTransfer free{LensMode::without_lens, &letter, geom, INFINITY};
        CHECK(std::abs(transfer(free, ri, rj, 9, 21) -
                       h2_at(letter, geom, LensMode::without_lens, qi, qj, 9, 21)) <= 1e-13);
        const BranchTransfer lens{LensMode::with_lens, &letter, geom, INFINITY};
        CHECK(std::abs(transfer(lens, ri, rj, ri, rj) -
                       h2_at(letter, geom, LensMode::with_lens, qi, qj, ri, rj)) <= 1e-13);
      }
  }
}

TEST_CASE("analytic entangled imaging") {
  const GridSpec grid = test_grid();
  const OpticalGeometry geom = test_geometry();
  const SpdcParams p = test_params();
  const ObjectMask unit = make_unit_mask(grid);
  const int c = grid.n / 2;

  SUBCASE("disk object forms a uniform bright disk") {
    const double a = 10.5e-6;
    const ObjectMask disk = make_disk_mask(grid, a);
    const CoincidenceMap map = image_entangled_analytic(disk, unit, p, geom);
    const GridSpec det = map.spec;
    for (int i = 0; i < grid.n; ++i)
      for (int j = 0; j < grid.n; ++j) {
        const double r = std::hypot(det.coord(i), det.coord(j));
        const double m = geom.magnification();
        if (r <= m * a - det.pitch * 1.5)
          CHECK(map.rates.at(i, j) == doctest::Approx(map.norm).epsilon(1e-12));
        if (r >= m * a + det.pitch * 1.5) CHECK(map.rates.at(i, j) == 0.0);
      }
  }

  SUBCASE("object in branch 2 appears point-reflected") {
    const ObjectMask letter = make_letter_f_mask(grid, 30e-6);
    const CoincidenceMap ghost = image_entangled_analytic(unit, letter, p, geom);
    const RealGrid expected = reflect(letter.intensity());
    for (int i = 0; i < grid.n; ++i)
      for (int j = 0; j < grid.n; ++j)
        CHECK(ghost.rates.at(i, j) == ghost.norm * expected.at(i, j));
  }

  SUBCASE("object phases never enter the analytic map") {
    const ObjectMask disk = make_disk_mask(grid, 10e-6);
    const ObjectMask slit = make_slit_mask(grid, 12e-6);
    const CoincidenceMap ref = image_entangled_analytic(disk, slit, p, geom);
    const CoincidenceMap screened = image_entangled_analytic(
        disk.with_screen(random_screen(3, 2.0)),
        slit.with_screen(random_screen(4, 2.0)), p, geom);
    for (std::size_t k = 0; k < ref.rates.v.size(); ++k)
      CHECK(screened.rates.v[k] == ref.rates.v[k]);
  }

  SUBCASE("product structure factorizes") {
    const ObjectMask disk = make_disk_mask(grid, 10e-6);
    const ObjectMask slit = make_slit_mask(grid, 12e-6);
    const CoincidenceMap ab = image_entangled_analytic(disk, slit, p, geom);
    const CoincidenceMap a1 = image_entangled_analytic(disk, unit, p, geom);
    const CoincidenceMap b1 = image_entangled_analytic(unit, slit, p, geom);
    RealGrid prod(ab.spec);
    for (std::size_t k = 0; k < prod.v.size(); ++k)
      prod.v[k] = a1.rates.v[k] * b1.rates.v[k];
    CHECK(max_rel_diff(normalized(prod), ab.peak_normalized()) <= 1e-12);
  }

  SUBCASE("ghost image is exactly the reflected direct image") {
    const ObjectMask letter = make_letter_f_mask(grid, 30e-6);
    const CoincidenceMap direct = image_entangled_analytic(letter, unit, p, geom);
    const CoincidenceMap ghost = image_entangled_analytic(unit, letter, p, geom);
    const RealGrid flipped = reflect(direct.rates);
    std::size_t mismatches = 0;
    for (std::size_t k = 0; k < flipped.v.size(); ++k)
      if (ghost.rates.v[k] != flipped.v[k]) ++mismatches;
    CHECK(mismatches == 0);
  }

  SUBCASE("magnification scales the image radius within one pixel") {
    const double a = 10.5e-6;
    for (double m : {0.5, 1.0, 2.0}) {
      const OpticalGeometry gm = test_geometry(m);
      const ObjectMask disk = make_disk_mask(grid, a);
      const CoincidenceMap map = image_entangled_analytic(disk, unit, p, gm);
      const GridSpec det = gm.detector_grid(grid);
      double rmax = 0;
      for (int j = 0; j < grid.n; ++j)
        if (map.rates.at(c, j) > 0) rmax = std::max(rmax, std::abs(det.coord(j)));
      CHECK(std::abs(rmax - m * a) <= det.pitch);
    }
  }
}

TEST_CASE("bruteforce quadrature agrees with the closed form") {
  const GridSpec grid = test_grid();
  const OpticalGeometry geom = test_geometry();
  const SpdcParams p = test_params();
  const ObjectMask unit = make_unit_mask(grid);

  SUBCASE("unit masks give a flat map within 1%") {
    const CoincidenceMap map = image_entangled_bruteforce(
        unit, unit, p, geom, LensMode::with_lens, LensMode::with_lens);
    const CoincidenceMap ref = image_entangled_analytic(unit, unit, p, geom);
    CHECK(max_rel_diff(map.peak_normalized(), ref.peak_normalized()) <= 0.01);
  }

  SUBCASE("disk and slit give the pointwise product within 1%") {
    const ObjectMask disk = make_disk_mask(grid, 10.5e-6);
    const ObjectMask slit = make_slit_mask(grid, 12e-6);
    const CoincidenceMap map = image_entangled_bruteforce(
        disk, slit, p, geom, LensMode::with_lens, LensMode::with_lens);
    const CoincidenceMap ref = image_entangled_analytic(disk, slit, p, geom);
    CHECK(max_rel_diff(map.peak_normalized(), ref.peak_normalized()) <= 0.01);
  }

  SUBCASE("phase screens cancel through the quadrature") {
    const ObjectMask disk = make_disk_mask(grid, 10.5e-6);
    const ObjectMask slit = make_slit_mask(grid, 12e-6);
    const CoincidenceMap map = image_entangled_bruteforce(
        disk.with_screen(random_screen(21, 2.0)),
        slit.with_screen(random_screen(22, 2.0)), p, geom, LensMode::with_lens,
        LensMode::with_lens);
    const RealGrid ref = image_entangled_analytic(disk, slit, p, geom).peak_normalized();
    CHECK(max_rel_diff(map.peak_normalized(), ref) <= 1e-3);
  }
}

TEST_CASE("lens ablation") {
  const GridSpec grid = test_grid();
  const OpticalGeometry geom = test_geometry();
  const SpdcParams p = test_params();
  const ObjectMask disk = make_disk_mask(grid, 10.5e-6);
  const ObjectMask slit = make_slit_mask(grid, 12e-6);

  SUBCASE("removing the branch-1 lens flattens the map") {
    const CoincidenceMap map = image_entangled_bruteforce(
        disk, slit, p, geom, LensMode::without_lens, LensMode::with_lens);
    CHECK(coefficient_of_variation(map.rates) <= 1e-6);
  }

  SUBCASE("removing the branch-2 lens has no effect") {
    const CoincidenceMap both = image_entangled_bruteforce(
        disk, slit, p, geom, LensMode::with_lens, LensMode::with_lens);
    const CoincidenceMap no2 = image_entangled_bruteforce(
        disk, slit, p, geom, LensMode::with_lens, LensMode::without_lens);
    CHECK(max_rel_diff(no2.rates, both.rates) <= 1e-6);
  }

  SUBCASE("removing both lenses also destroys the image") {
    const CoincidenceMap map = image_entangled_bruteforce(
        disk, slit, p, geom, LensMode::without_lens, LensMode::without_lens);
    // The finite bucket truncates the shift invariance, so this map is flat
    // only up to the measured truncation residue.
    CHECK(coefficient_of_variation(map.rates) <= 1e-4);
  }
}

TEST_CASE("bruteforce engines match the literal transfer-function sum") {
  const GridSpec grid(16, 1e-6);
  const OpticalGeometry geom = test_geometry();
  const SpdcParams p = test_params(3);
  const ObjectMask g1 = make_disk_mask(grid, 3.5e-6).with_screen(random_screen(31, 1.5));
  ObjectMask g2 = make_slit_mask(grid, 4e-6).with_screen(random_screen(32, 1.5));

  const std::vector<std::pair<int, int>> samples = {{8, 8}, {10, 7}, {3, 12}};
  for (LensMode m1 : {LensMode::with_lens, LensMode::without_lens}) {
    for (LensMode m2 : {LensMode::with_lens, LensMode::without_lens}) {
      const CoincidenceMap map = image_entangled_bruteforce(g1, g2, p, geom, m1, m2);
      for (const auto& [i, j] : samples) {
        const double engine = map.rates.at(i, j) * map.norm;
        const double oracle = direct_rate(g1, g2, p, geom, m1, m2, i, j);
        const double scale = std::max(std::abs(oracle), map.norm);
        CHECK(std::abs(engine - oracle) <= 1e-9 * scale);
      }
    }
  }
}

TEST_CASE("classical source imaging") {
  const GridSpec grid = test_grid();
  const OpticalGeometry geom = test_geometry();
  const GridSpec qgrid = geom.momentum_grid(grid);
  const SpdcParams p = test_params();
  const ObjectMask unit = make_unit_mask(grid);
  const ObjectMask disk = make_disk_mask(grid, 10.5e-6);
  const ObjectMask slit = make_slit_mask(grid, 12e-6);

  SUBCASE("uniform spectrum reproduces the entangled shape") {
    const ClassicalSpectrum uniform = ClassicalSpectrum::uniform(qgrid);
    const CoincidenceMap cls = image_classical(disk, slit, uniform, geom);
    const CoincidenceMap ent = image_entangled_analytic(disk, slit, p, geom);
    CHECK(max_rel_diff(cls.peak_normalized(), ent.peak_normalized()) <= 1e-12);
  }

  SUBCASE("gaussian spectrum imposes its envelope, checked against the quadrature") {
    const double sigma_q = 160.0;
    const ClassicalSpectrum gauss = ClassicalSpectrum::gaussian(qgrid, sigma_q);
    const CoincidenceMap analytic = image_classical(unit, unit, gauss, geom);
    const CoincidenceMap brute = image_classical_bruteforce(
        unit, unit, gauss, geom, LensMode::with_lens, LensMode::with_lens);
    CHECK(max_rel_diff(brute.peak_normalized(), analytic.peak_normalized()) <= 1e-2);

    const GridSpec det = geom.detector_grid(grid);
    const double sx = sigma_q * geom.f_d / geom.k;
    RealGrid envelope(det);
    for (int i = 0; i < det.n; ++i)
      for (int j = 0; j < det.n; ++j) {
        const double x = det.coord(i), y = det.coord(j);
        envelope.at(i, j) = std::exp(-(x * x + y * y) / (sx * sx));
      }
    CHECK(max_rel_diff(analytic.peak_normalized(), normalized(envelope)) <= 1e-12);
  }

  SUBCASE("phase screens cancel on both classical paths") {
    const ClassicalSpectrum uniform = ClassicalSpectrum::uniform(qgrid);
    const ObjectMask g1 = disk.with_screen(random_screen(41, 2.0));
    const ObjectMask g2 = slit.with_screen(random_screen(42, 2.0));
    const CoincidenceMap ref = image_classical(disk, slit, uniform, geom);
    const CoincidenceMap screened = image_classical(g1, g2, uniform, geom);
    CHECK(max_rel_diff(screened.rates, ref.rates) <= 1e-12);
    const CoincidenceMap brute = image_classical_bruteforce(
        g1, g2, uniform, geom, LensMode::with_lens, LensMode::with_lens);
    CHECK(max_rel_diff(brute.peak_normalized(), ref.peak_normalized()) <= 1e-3);
  }

  SUBCASE("odd spectra are rejected") {
    ComplexField f(qgrid, Complex(1.0, 0.0));
    CHECK_THROWS_AS(
        image_classical(disk, slit, ClassicalSpectrum(std::move(f), false), geom),
        PhysicsError);
  }
}

TEST_CASE("B and C integrals are flat across the detector") {
  const GridSpec grid = test_grid();
  const OpticalGeometry geom = test_geometry();
  const SpdcParams p = test_params();
  const int c = grid.n / 2;
  const BcSpread bc = bc_constancy(
      p, geom, grid, {{c, c}, {c + 8, c}, {c, c + 8}, {c - 12, c + 4}, {c + 16, c + 16}});
  CHECK(bc.b_spread <= 1e-6);
  CHECK(bc.c_spread <= 1e-6);
  CHECK(bc.b_mean > 0);
  // The detuning window is symmetric, so the cross integral pairs nu with
  // -nu and is real up to rounding.
  CHECK(std::abs(bc.c_mean.imag()) <= 1e-12 * std::abs(bc.c_mean));
}

TEST_CASE("work budget guards the bucket quadrature") {
  const GridSpec grid = test_grid();
  const OpticalGeometry geom = test_geometry();
  const SpdcParams p = test_params();
  const ObjectMask unit = make_unit_mask(grid);
  setenv("GHOSTSIM_WORK_BUDGET", "1000", 1);
  CHECK_THROWS_AS(image_entangled_bruteforce(unit, unit, p, geom,
                                             LensMode::without_lens,
                                             LensMode::with_lens),
                  ResourceError);
  unsetenv("GHOSTSIM_WORK_BUDGET");
}

TEST_CASE("bruteforce maps are identical for any thread count") {
  const GridSpec grid = test_grid(32);
  const OpticalGeometry geom = test_geometry();
  const SpdcParams p = test_params(3);
  const ObjectMask disk = make_disk_mask(grid, 6.5e-6);
  const ObjectMask slit = make_slit_mask(grid, 8e-6);
  const CoincidenceMap one = image_entangled_bruteforce(
      disk, slit, p, geom, LensMode::without_lens, LensMode::with_lens, 1);
  const CoincidenceMap eight = image_entangled_bruteforce(
      disk, slit, p, geom, LensMode::without_lens, LensMode::with_lens, 8);
  for (std::size_t k = 0; k < one.rates.v.size(); ++k)
    CHECK(one.rates.v[k] == eight.rates.v[k]);
  CHECK(one.norm == eight.norm);
}
