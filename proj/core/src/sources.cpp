#include "ghostsim/sources.hpp"

#include <cmath>

namespace ghostsim {

std::vector<NuNode> nu_quadrature(const SpdcParams& p) {
  p.validate();
  std::vector<NuNode> nodes;
  nodes.reserve(p.n_nu);
  if (p.n_nu == 1) {
    nodes.push_back({0.0, 2.0 * p.bandwidth});
    return nodes;
  }
  const double h = 2.0 * p.bandwidth / (p.n_nu - 1);
  const int half = (p.n_nu - 1) / 2;
  for (int j = -half; j <= half; ++j) {
    const double w = (j == -half || j == half) ? 0.5 * h : h;
    nodes.push_back({j * h, w});
  }
  return nodes;
}

double phase_mismatch(double qx, double qy, double nu, const SpdcParams& p) {
  return -nu * p.group_delay + p.walkoff * qy +
         2.0 * (qx * qx + qy * qy) / p.k_pump;
}

double sinc(double u) {
  if (std::abs(u) < 1e-4) return 1.0 - u * u / 6.0;
  return std::sin(u) / u;
}

Complex spdc_spectrum(double qx, double qy, double nu, const SpdcParams& p) {
  const double half_arg = 0.5 * p.crystal_length * phase_mismatch(qx, qy, nu, p);
  return sinc(half_arg) * Complex(std::cos(half_arg), std::sin(half_arg));
}

ClassicalSpectrum::ClassicalSpectrum(ComplexField f, bool expect_even)
    : f_(std::move(f)), even_(expect_even) {
  if (!all_finite(f_)) throw PhysicsError("classical spectrum: non-finite F");
  if (even_) {
    double max_abs = 0.0;
    for (const Complex& z : f_.v) max_abs = std::max(max_abs, std::abs(z));
    if (max_abs == 0.0) throw PhysicsError("classical spectrum: F is identically zero");
    const ComplexField r = reflect(f_);
    for (std::size_t k = 0; k < f_.v.size(); ++k) {
      if (std::abs(f_.v[k] - r.v[k]) > 1e-12 * max_abs)
        throw PhysicsError("classical spectrum: F marked even but F(-q) != F(q)");
    }
  }
}

ClassicalSpectrum ClassicalSpectrum::uniform(const GridSpec& momentum_grid) {
  return ClassicalSpectrum(ComplexField(momentum_grid, {1.0, 0.0}));
}

ClassicalSpectrum ClassicalSpectrum::gaussian(const GridSpec& momentum_grid,
                                              double sigma_q) {
  if (!(sigma_q > 0)) throw ConfigError("classical spectrum: sigma_q must be > 0");
  ComplexField f(momentum_grid);
  for (int i = 0; i < momentum_grid.n; ++i) {
    const double qx = momentum_grid.coord(i);
    for (int j = 0; j < momentum_grid.n; ++j) {
      const double qy = momentum_grid.coord(j);
      f.at(i, j) = std::exp(-(qx * qx + qy * qy) / (2.0 * sigma_q * sigma_q));
    }
  }
  return ClassicalSpectrum(std::move(f));
}

}  // namespace ghostsim
