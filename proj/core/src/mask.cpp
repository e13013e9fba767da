#include "ghostsim/mask.hpp"

#include <cmath>

namespace ghostsim {

namespace {

void validate_amplitude(const RealGrid& t) {
  t.spec.validate();
  for (double v : t.v) {
    if (!(v >= 0.0 && v <= 1.0))
      throw PhysicsError("mask: transmittance outside [0, 1]: " + std::to_string(v));
  }
}

}  // namespace

ObjectMask::ObjectMask(RealGrid amplitude, RealGrid phase)
    : amplitude_(std::move(amplitude)), phase_(std::move(phase)) {
  validate_amplitude(amplitude_);
  if (!(phase_.spec == amplitude_.spec))
    throw ConfigError("mask: amplitude and phase grids disagree");
  if (!all_finite(phase_)) throw PhysicsError("mask: non-finite phase");
}

ObjectMask::ObjectMask(RealGrid amplitude)
    : amplitude_(std::move(amplitude)), phase_(amplitude_.spec) {
  validate_amplitude(amplitude_);
}

ComplexField ObjectMask::as_complex() const {
  ComplexField f(spec());
  for (std::size_t k = 0; k < f.v.size(); ++k)
    f.v[k] = std::polar(amplitude_.v[k], phase_.v[k]);
  return f;
}

RealGrid ObjectMask::intensity() const {
  RealGrid w(spec());
  for (std::size_t k = 0; k < w.v.size(); ++k)
    w.v[k] = amplitude_.v[k] * amplitude_.v[k];
  return w;
}

ObjectMask ObjectMask::with_screen(const PhaseScreen& screen) const {
  return with_phase(render_phase_screen(screen, spec()));
}

ObjectMask ObjectMask::with_phase(const RealGrid& phi) const {
  if (!(phi.spec == spec())) throw ConfigError("mask: phase grid spec mismatch");
  RealGrid p = phase_;
  for (std::size_t k = 0; k < p.v.size(); ++k) p.v[k] += phi.v[k];
  return ObjectMask(amplitude_, std::move(p));
}

ObjectMask ObjectMask::phase_free() const { return ObjectMask(amplitude_); }

bool ObjectMask::fully_opaque() const {
  for (double v : amplitude_.v)
    if (v != 0.0) return false;
  return true;
}

ObjectMask make_unit_mask(const GridSpec& spec) {
  return ObjectMask(RealGrid(spec, 1.0));
}

ObjectMask make_disk_mask(const GridSpec& spec, double radius_m) {
  if (!(radius_m > 0.0)) throw ConfigError("disk: radius must be > 0");
  if (radius_m >= (spec.n / 2) * spec.pitch)
    throw ConfigError("disk: radius does not fit inside the grid");
  RealGrid t(spec);
  const double r2 = radius_m * radius_m;
  for (int i = 0; i < spec.n; ++i) {
    const double x = spec.coord(i);
    for (int j = 0; j < spec.n; ++j) {
      const double y = spec.coord(j);
      if (x * x + y * y <= r2) t.at(i, j) = 1.0;
    }
  }
  return ObjectMask(std::move(t));
}

ObjectMask make_slit_mask(const GridSpec& spec, double width_m) {
  if (!(width_m > 0.0)) throw ConfigError("slit: width must be > 0");
  if (width_m >= spec.n * spec.pitch)
    throw ConfigError("slit: width does not fit inside the grid");
  RealGrid t(spec);
  for (int i = 0; i < spec.n; ++i) {
    if (std::abs(spec.coord(i)) <= width_m / 2)
      for (int j = 0; j < spec.n; ++j) t.at(i, j) = 1.0;
  }
  return ObjectMask(std::move(t));
}

ObjectMask make_pinhole_mask(const GridSpec& spec) {
  RealGrid t(spec);
  t.at(spec.n / 2, spec.n / 2) = 1.0;
  return ObjectMask(std::move(t));
}

ObjectMask make_letter_f_mask(const GridSpec& spec, double height_m) {
  if (!(height_m > 0.0) || height_m > spec.n * spec.pitch)
    throw ConfigError("letter: height must be > 0 and fit the grid");
  RealGrid t(spec);
  const double h = height_m;
  const double stem_w = h / 5.0;
  const double bar_l = 0.6 * h;
  // Stem along e1 at the left edge of the glyph box, bars along e2.
  const double x0 = -h / 2, x1 = h / 2;
  const double y0 = -bar_l / 2;
  for (int i = 0; i < spec.n; ++i) {
    const double x = spec.coord(i);
    if (x < x0 || x > x1) continue;
    for (int j = 0; j < spec.n; ++j) {
      const double y = spec.coord(j);
      const bool stem = y >= y0 && y <= y0 + stem_w;
      const bool top_bar = x >= x1 - stem_w && y >= y0 && y <= y0 + bar_l;
      const bool mid_bar = x >= -stem_w / 2 && x <= stem_w / 2 && y >= y0 && y <= y0 + 0.7 * bar_l;
      if (stem || top_bar || mid_bar) t.at(i, j) = 1.0;
    }
  }
  return ObjectMask(std::move(t));
}

}  // namespace ghostsim
