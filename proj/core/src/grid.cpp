#include "ghostsim/grid.hpp"

#include <cmath>

namespace ghostsim {

namespace {

template <typename G>
G reflect_impl(const G& f) {
  G out(f.spec);
  const int n = f.spec.n;
  for (int i = 0; i < n; ++i) {
    const int ri = f.spec.reflect_index(i);
    for (int j = 0; j < n; ++j) {
      out.v[f.spec.index(ri, f.spec.reflect_index(j))] = f.v[f.spec.index(i, j)];
    }
  }
  return out;
}

}  // namespace

ComplexField reflect(const ComplexField& f) { return reflect_impl(f); }
RealGrid reflect(const RealGrid& g) { return reflect_impl(g); }

std::pair<RealGrid, RealGrid> decompose_parity(const RealGrid& phi) {
  RealGrid even(phi.spec);
  RealGrid odd(phi.spec);
  const int n = phi.spec.n;
  for (int i = 0; i < n; ++i) {
    const int ri = phi.spec.reflect_index(i);
    for (int j = 0; j < n; ++j) {
      const std::size_t p = phi.spec.index(i, j);
      const std::size_t rp = phi.spec.index(ri, phi.spec.reflect_index(j));
      const double e = 0.5 * (phi.v[p] + phi.v[rp]);
      even.v[p] = e;
      odd.v[p] = phi.v[p] - e;
    }
  }
  return {std::move(even), std::move(odd)};
}

bool all_finite(const RealGrid& g) {
  for (double x : g.v)
    if (!std::isfinite(x)) return false;
  return true;
}

bool all_finite(const ComplexField& f) {
  for (const Complex& z : f.v)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

}  // namespace ghostsim
