#include "ghostsim/phase_screen.hpp"

#include <cmath>
#include <cstdlib>

namespace ghostsim {

namespace {

double factorial(int k) {
  double r = 1.0;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

/// Coefficients c_s of R_n^m(rho) = rho^m * sum_s c_s * (rho^2)^((n-m)/2 - s).
std::vector<double> radial_coefficients(int n, int m) {
  std::vector<double> c((n - m) / 2 + 1);
  for (int s = 0; s <= (n - m) / 2; ++s) {
    const double num = (s % 2 == 0 ? 1.0 : -1.0) * factorial(n - s);
    const double den = factorial(s) * factorial((n + m) / 2 - s) * factorial((n - m) / 2 - s);
    c[s] = num / den;
  }
  return c;
}

void validate_mode(const ScreenMode& mode) {
  const int n = mode.radial;
  const int m = std::abs(mode.azimuthal);
  if (n < 0 || m > n || (n - m) % 2 != 0)
    throw ConfigError("phase screen: invalid mode (radial=" + std::to_string(n) +
                      ", azimuthal=" + std::to_string(mode.azimuthal) +
                      "); need 0 <= |azimuthal| <= radial with equal parity");
}

void accumulate_mode(RealGrid& out, const ScreenMode& mode, double weight) {
  validate_mode(mode);
  const int n = mode.radial;
  const int m = std::abs(mode.azimuthal);
  const bool sine_branch = mode.azimuthal < 0;
  const std::vector<double> coeff = radial_coefficients(n, m);

  const GridSpec& spec = out.spec;
  const double r_disk = (spec.n / 2) * spec.pitch;

  for (int i = 0; i < spec.n; ++i) {
    const double x = spec.coord(i) / r_disk;
    for (int j = 0; j < spec.n; ++j) {
      const double y = spec.coord(j) / r_disk;
      const double u = x * x + y * y;  // rho^2, exactly even in (x, y)
      if (u >= 1.0) continue;

      // Radial polynomial in u; Horner over the c_s ladder.
      double radial = 0.0;
      for (double c : coeff) radial = radial * u + c;

      // Angular factor rho^m cos(m theta) or rho^m sin(m theta) as a
      // harmonic polynomial: (x + i y)^m by recurrence. Every operation is
      // sign-symmetric, so reflected pixels get exact sign flips.
      double cosm = 1.0, sinm = 0.0;
      for (int s = 0; s < m; ++s) {
        const double c2 = cosm * x - sinm * y;
        const double s2 = sinm * x + cosm * y;
        cosm = c2;
        sinm = s2;
      }
      const double angular = sine_branch ? sinm : cosm;
      out.v[spec.index(i, j)] += weight * (radial * angular);
    }
  }
}

}  // namespace

ScreenMode screen_mode_by_name(const std::string& name) {
  if (name == "piston") return {0, 0};
  if (name == "tilt_x") return {1, 1};
  if (name == "tilt_y") return {1, -1};
  if (name == "defocus") return {2, 0};
  if (name == "astig") return {2, 2};
  if (name == "astig45") return {2, -2};
  if (name == "coma_x") return {3, 1};
  if (name == "coma_y") return {3, -1};
  if (name == "trefoil") return {3, 3};
  if (name == "trefoil45") return {3, -3};
  if (name == "spherical") return {4, 0};
  throw ConfigError("phase screen: unknown mode name '" + name + "'");
}

void PhaseScreen::add(const std::string& name, double weight_rad) {
  add(screen_mode_by_name(name), weight_rad);
}

bool PhaseScreen::pure_even() const {
  for (const auto& [mode, w] : coefficients)
    if (!mode.even()) return false;
  return true;
}

bool PhaseScreen::pure_odd() const {
  for (const auto& [mode, w] : coefficients)
    if (mode.even()) return false;
  return true;
}

RealGrid render_phase_screen(const PhaseScreen& screen, const GridSpec& spec) {
  spec.validate();
  RealGrid out(spec);
  for (const auto& [mode, weight] : screen.coefficients)
    accumulate_mode(out, mode, weight);
  return out;
}

RealGrid render_mode(ScreenMode mode, double weight_rad, const GridSpec& spec) {
  spec.validate();
  RealGrid out(spec);
  accumulate_mode(out, mode, weight_rad);
  return out;
}

}  // namespace ghostsim
