#include "ghostsim/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "ghostsim/threading.hpp"

namespace ghostsim {

namespace {

std::int64_t work_budget() {
  if (const char* env = std::getenv("GHOSTSIM_WORK_BUDGET")) {
    const long long b = std::atoll(env);
    if (b > 0) return b;
  }
  return 60'000'000'000LL;
}

void check_masks(const ObjectMask& g1, const ObjectMask& g2) {
  if (!(g1.spec() == g2.spec()))
    throw ConfigError("imaging: masks must share a GridSpec");
}

/// e^{i q_a x_b} with q on the momentum grid and x on the detector grid;
/// layout [q][x].
std::vector<Complex> phase_table(const GridSpec& qgrid, const GridSpec& det) {
  std::vector<Complex> t(static_cast<std::size_t>(qgrid.n) * det.n);
  for (int a = 0; a < qgrid.n; ++a) {
    const double q = qgrid.coord(a);
    for (int b = 0; b < det.n; ++b) {
      const double th = q * det.coord(b);
      t[static_cast<std::size_t>(a) * det.n + b] = Complex(std::cos(th), std::sin(th));
    }
  }
  return t;
}

std::vector<Complex> transpose_table(const std::vector<Complex>& t, int n) {
  std::vector<Complex> out(t.size());
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) out[static_cast<std::size_t>(b) * n + a] = t[static_cast<std::size_t>(a) * n + b];
  return out;
}

/// Detector-plane quadratic prefactor e^{-i k |x|^2 / (2 f_D) (d2 / f_D - 1)}.
std::vector<Complex> quad_phase_x(const GridSpec& det, const OpticalGeometry& geom) {
  const double c = geom.k / (2.0 * geom.f_d) * (geom.d2 / geom.f_d - 1.0);
  std::vector<Complex> t(det.size());
  for (int i = 0; i < det.n; ++i) {
    const double x = det.coord(i);
    for (int j = 0; j < det.n; ++j) {
      const double y = det.coord(j);
      const double th = -c * (x * x + y * y);
      t[det.index(i, j)] = Complex(std::cos(th), std::sin(th));
    }
  }
  return t;
}

/// Momentum-side quadratic prefactor e^{-i d1 |q|^2 / (2k)}.
std::vector<Complex> quad_phase_q(const GridSpec& qgrid, const OpticalGeometry& geom) {
  const double c = geom.d1 / (2.0 * geom.k);
  std::vector<Complex> t(qgrid.size());
  for (int i = 0; i < qgrid.n; ++i) {
    const double qx = qgrid.coord(i);
    for (int j = 0; j < qgrid.n; ++j) {
      const double qy = qgrid.coord(j);
      const double th = -c * (qx * qx + qy * qy);
      t[qgrid.index(i, j)] = Complex(std::cos(th), std::sin(th));
    }
  }
  return t;
}

std::vector<char> aperture_mask(const GridSpec& det, double pupil_radius) {
  std::vector<char> m(det.size(), 1);
  if (std::isfinite(pupil_radius)) {
    const double r2 = pupil_radius * pupil_radius;
    for (int i = 0; i < det.n; ++i) {
      const double x = det.coord(i);
      for (int j = 0; j < det.n; ++j) {
        const double y = det.coord(j);
        m[det.index(i, j)] = (x * x + y * y <= r2) ? 1 : 0;
      }
    }
  }
  return m;
}

/// Direct separable synthesis U(u) = sum_q S(q) e^{i c q . u} evaluated on
/// the (2n-1)^2 lattice of detector-pixel differences. Exact for any pitch
/// relation between the grids; O(n^3) per axis.
std::vector<Complex> synthesize_difference(const std::vector<Complex>& s,
                                           const GridSpec& qgrid,
                                           const GridSpec& det, double harmonic) {
  const int n = qgrid.n;
  const int nd = 2 * n - 1;
  std::vector<Complex> m(static_cast<std::size_t>(n) * nd);
  for (int a = 0; a < n; ++a) {
    const double q = qgrid.coord(a);
    for (int d = 0; d < nd; ++d) {
      const double u = (d - (n - 1)) * det.pitch;
      const double th = harmonic * q * u;
      m[static_cast<std::size_t>(a) * nd + d] = Complex(std::cos(th), std::sin(th));
    }
  }
  // T1[qi][d2] = sum_qj S[qi][qj] M[qj][d2]
  std::vector<Complex> t1(static_cast<std::size_t>(n) * nd, Complex(0, 0));
  for (int qi = 0; qi < n; ++qi) {
    for (int qj = 0; qj < n; ++qj) {
      const Complex sv = s[static_cast<std::size_t>(qi) * n + qj];
      if (sv == Complex(0, 0)) continue;
      const Complex* mrow = &m[static_cast<std::size_t>(qj) * nd];
      Complex* trow = &t1[static_cast<std::size_t>(qi) * nd];
      for (int d = 0; d < nd; ++d) trow[d] += sv * mrow[d];
    }
  }
  // U[d1][d2] = sum_qi M[qi][d1] T1[qi][d2]
  std::vector<Complex> u(static_cast<std::size_t>(nd) * nd, Complex(0, 0));
  for (int qi = 0; qi < n; ++qi) {
    const Complex* mrow = &m[static_cast<std::size_t>(qi) * nd];
    const Complex* trow = &t1[static_cast<std::size_t>(qi) * nd];
    for (int d1 = 0; d1 < nd; ++d1) {
      const Complex mv = mrow[d1];
      Complex* urow = &u[static_cast<std::size_t>(d1) * nd];
      for (int d2 = 0; d2 < nd; ++d2) urow[d2] += mv * trow[d2];
    }
  }
  return u;
}

CoincidenceMap finalize_bruteforce(const GridSpec& det, RealGrid raw, SourceKind src) {
  CoincidenceMap map;
  map.spec = det;
  map.norm = max_abs(raw);
  if (map.norm > 0)
    for (double& v : raw.v) v /= map.norm;
  map.rates = std::move(raw);
  map.path = ImagePath::bruteforce;
  map.source = src;
  return map;
}

}  // namespace

RealGrid CoincidenceMap::peak_normalized() const {
  RealGrid out = rates;
  const double peak = max_abs(out);
  if (peak > 0)
    for (double& v : out.v) v /= peak;
  return out;
}

Complex transfer(const BranchTransfer& branch, int qi, int qj, int xi, int xj) {
  if (branch.mask == nullptr) throw ConfigError("transfer: branch has no mask");
  const ObjectMask& mask = *branch.mask;
  const GridSpec& spec = mask.spec();
  const GridSpec qgrid = branch.geom.momentum_grid(spec);
  const GridSpec det = branch.geom.detector_grid(spec);

  const double x = det.coord(xi), y = det.coord(xj);
  if (std::isfinite(branch.pupil_radius) &&
      x * x + y * y > branch.pupil_radius * branch.pupil_radius)
    return {0, 0};

  // x_obj = f q / k of bin (qi, qj) is exactly mask pixel (qi, qj).
  const Complex g = std::polar(mask.amplitude().at(qi, qj), mask.phase().at(qi, qj));

  if (branch.mode == LensMode::without_lens) {
    const double th = qgrid.coord(qi) * x + qgrid.coord(qj) * y;
    return g * Complex(std::cos(th), std::sin(th));
  }

  // With the detection lens each bin is localized at x = f_D q / k, which is
  // exactly detector pixel (qi, qj) on the locked grids.
  if (xi != qi || xj != qj) return {0, 0};
  const double qx = qgrid.coord(qi), qy = qgrid.coord(qj);
  const double cx = branch.geom.k / (2.0 * branch.geom.f_d) * (branch.geom.d2 / branch.geom.f_d - 1.0);
  const double cq = branch.geom.d1 / (2.0 * branch.geom.k);
  const double th = -cx * (x * x + y * y) - cq * (qx * qx + qy * qy);
  return Complex(std::cos(th), std::sin(th)) * g * static_cast<double>(spec.n);
}

double b_integral(double qx, double qy, const SpdcParams& p) {
  double acc = 0;
  for (const NuNode& node : nu_quadrature(p))
    acc += node.weight * std::norm(spdc_spectrum(qx, qy, node.nu, p));
  return acc;
}

Complex c_integral(double qx, double qy, const SpdcParams& p) {
  Complex acc = 0;
  for (const NuNode& node : nu_quadrature(p))
    acc += node.weight * spdc_spectrum(qx, qy, node.nu, p) *
           std::conj(spdc_spectrum(-qx, -qy, -node.nu, p));
  return acc;
}

double analytic_norm_constant(const SpdcParams& p) {
  return 2.0 * b_integral(0, 0, p) + 2.0 * c_integral(0, 0, p).real();
}

BcSpread bc_constancy(const SpdcParams& p, const OpticalGeometry& geom,
                      const GridSpec& mask_spec,
                      const std::vector<std::pair<int, int>>& det_pixels) {
  if (det_pixels.size() < 2)
    throw ConfigError("bc_constancy: need at least two sample pixels");
  const GridSpec qgrid = geom.momentum_grid(mask_spec);
  std::vector<double> bs;
  std::vector<Complex> cs;
  for (const auto& [i, j] : det_pixels) {
    const double qx = qgrid.coord(i), qy = qgrid.coord(j);
    bs.push_back(b_integral(qx, qy, p));
    cs.push_back(c_integral(qx, qy, p));
  }
  BcSpread out;
  double bsum = 0;
  Complex csum = 0;
  for (double b : bs) bsum += b;
  for (const Complex& c : cs) csum += c;
  out.b_mean = bsum / static_cast<double>(bs.size());
  out.c_mean = csum / static_cast<double>(cs.size());
  const auto [bmin, bmax] = std::minmax_element(bs.begin(), bs.end());
  out.b_spread = out.b_mean != 0 ? (*bmax - *bmin) / std::abs(out.b_mean) : 0.0;
  double cdev = 0;
  for (const Complex& c : cs) cdev = std::max(cdev, std::abs(c - out.c_mean));
  out.c_spread = std::abs(out.c_mean) > 0 ? cdev / std::abs(out.c_mean) : cdev;
  return out;
}

CoincidenceMap image_entangled_analytic(const ObjectMask& g1, const ObjectMask& g2,
                                        const SpdcParams& p,
                                        const OpticalGeometry& geom) {
  check_masks(g1, g2);
  geom.validate();
  p.validate();
  const GridSpec& spec = g1.spec();
  const GridSpec det = geom.detector_grid(spec);
  const double r0 = analytic_norm_constant(p);
  const RealGrid w1 = g1.intensity();
  const RealGrid w2 = g2.intensity();

  CoincidenceMap map;
  map.spec = det;
  map.rates = RealGrid(det);
  map.norm = r0;
  map.path = ImagePath::analytic;
  map.source = SourceKind::spdc;
  for (int i = 0; i < spec.n; ++i) {
    const int ri = spec.reflect_index(i);
    for (int j = 0; j < spec.n; ++j) {
      map.rates.at(i, j) = r0 * (w1.at(i, j) * w2.at(ri, spec.reflect_index(j)));
    }
  }
  return map;
}

CoincidenceMap image_classical(const ObjectMask& g1, const ObjectMask& g2,
                               const ClassicalSpectrum& s,
                               const OpticalGeometry& geom) {
  check_masks(g1, g2);
  geom.validate();
  if (!s.even())
    throw PhysicsError("classical imaging requires an even momentum spectrum");
  const GridSpec& spec = g1.spec();
  const GridSpec qgrid = geom.momentum_grid(spec);
  if (!(s.field().spec == qgrid))
    throw ConfigError("classical imaging: F is not sampled on the scenario momentum grid");
  const GridSpec det = geom.detector_grid(spec);
  const RealGrid w1 = g1.intensity();
  const RealGrid w2 = g2.intensity();

  CoincidenceMap map;
  map.spec = det;
  map.rates = RealGrid(det);
  map.norm = 1.0;
  map.path = ImagePath::analytic;
  map.source = SourceKind::classical;
  for (int i = 0; i < spec.n; ++i) {
    const int ri = spec.reflect_index(i);
    for (int j = 0; j < spec.n; ++j) {
      // q = k x1 / f_D of detector pixel (i, j) is exactly bin (i, j).
      const double fw = std::norm(s.field().at(i, j));
      map.rates.at(i, j) = fw * (w1.at(i, j) * w2.at(ri, spec.reflect_index(j)));
    }
  }
  return map;
}

CoincidenceMap image_entangled_bruteforce(const ObjectMask& g1, const ObjectMask& g2,
                                          const SpdcParams& p,
                                          const OpticalGeometry& geom,
                                          LensMode branch1, LensMode branch2,
                                          int threads) {
  check_masks(g1, g2);
  geom.validate();
  p.validate();
  const GridSpec& spec = g1.spec();
  const int n = spec.n;
  const GridSpec qgrid = geom.momentum_grid(spec);
  const GridSpec det = geom.detector_grid(spec);
  const std::vector<NuNode> nodes = nu_quadrature(p);
  const auto nnu = static_cast<std::int64_t>(nodes.size());

  const bool bucket_heavy =
      !(branch1 == LensMode::with_lens && branch2 == LensMode::with_lens);
  const std::int64_t n2 = static_cast<std::int64_t>(n) * n;
  const std::int64_t work = bucket_heavy ? nnu * n2 * n2 : nnu * n2;
  if (work > work_budget())
    throw ResourceError("bruteforce: estimated work " + std::to_string(work) +
                        " exceeds the budget; use a smaller grid (n = " +
                        std::to_string(n) + ")");

  const ComplexField f1 = g1.as_complex();
  const ComplexField f2 = g2.as_complex();
  const std::vector<Complex> quadx = quad_phase_x(det, geom);
  const std::vector<Complex> quadq = quad_phase_q(qgrid, geom);
  const std::vector<Complex> px = phase_table(qgrid, det);   // [q][x]
  const std::vector<Complex> pxt = transpose_table(px, n);   // [x][q]
  const std::vector<char> ap1 = aperture_mask(det, geom.pupil_radius1);
  const std::vector<char> ap2 = aperture_mask(det, geom.pupil_radius2);
  const double delta_amp = static_cast<double>(n);
  const int nthreads = effective_threads(threads);

  RealGrid raw(det);

  if (branch1 == LensMode::with_lens) {
    parallel_blocks(n, nthreads, [&](int row_begin, int row_end) {
      for (int i = row_begin; i < row_end; ++i) {
        const int ri = spec.reflect_index(i);
        const double qx = qgrid.coord(i);
        for (int j = 0; j < n; ++j) {
          const std::size_t x1 = det.index(i, j);
          if (!ap1[x1]) continue;
          const int rj = spec.reflect_index(j);
          const double qy = qgrid.coord(j);
          const Complex h1 = quadx[x1] * quadq[qgrid.index(i, j)] * f1.at(i, j) * delta_amp;
          double acc = 0;
          for (const NuNode& node : nodes) {
            const Complex a0 = spdc_spectrum(qx, qy, node.nu, p) * h1;
            if (branch2 == LensMode::with_lens) {
              const std::size_t x2 = det.index(ri, rj);
              if (!ap2[x2]) continue;
              const Complex a = a0 * quadx[x2] * quadq[qgrid.index(i, j)] *
                                f2.at(ri, rj) * delta_amp;
              acc += node.weight * std::norm(a);
            } else {
              const Complex a1 = a0 * f2.at(ri, rj);
              const Complex* rowx = &px[static_cast<std::size_t>(i) * n];
              const Complex* rowy = &px[static_cast<std::size_t>(j) * n];
              double s = 0;
              for (int a = 0; a < n; ++a) {
                const Complex pa = a1 * std::conj(rowx[a]);
                const char* aprow = &ap2[det.index(a, 0)];
                for (int b = 0; b < n; ++b) {
                  if (!aprow[b]) continue;
                  s += std::norm(pa * std::conj(rowy[b]));
                }
              }
              acc += node.weight * s;
            }
          }
          raw.at(i, j) = acc;
        }
      }
    });
    return finalize_bruteforce(det, std::move(raw), SourceKind::spdc);
  }

  if (branch2 == LensMode::with_lens) {
    // Branch 2 localizes each bucket pixel (a, b) at the single momentum bin
    // (reflect a, reflect b); precompute that amplitude per detuning node.
    std::vector<std::vector<Complex>> pre(nodes.size());
    for (std::size_t nn = 0; nn < nodes.size(); ++nn) {
      pre[nn].resize(static_cast<std::size_t>(n) * n);
      for (int a = 0; a < n; ++a) {
        const int ra = spec.reflect_index(a);
        const double qx = qgrid.coord(ra);
        for (int b = 0; b < n; ++b) {
          const int rb = spec.reflect_index(b);
          const std::size_t x2 = det.index(a, b);
          if (!ap2[x2]) {
            pre[nn][x2] = 0;
            continue;
          }
          const double qy = qgrid.coord(rb);
          pre[nn][x2] = spdc_spectrum(qx, qy, nodes[nn].nu, p) * f1.at(ra, rb) *
                        quadx[x2] * quadq[qgrid.index(ra, rb)] * f2.at(a, b) * delta_amp;
        }
      }
    }
    parallel_blocks(n, nthreads, [&](int row_begin, int row_end) {
      for (int i = row_begin; i < row_end; ++i) {
        const Complex* txrow = &pxt[static_cast<std::size_t>(i) * n];
        for (int j = 0; j < n; ++j) {
          if (!ap1[det.index(i, j)]) continue;
          const Complex* tyrow = &pxt[static_cast<std::size_t>(j) * n];
          double acc = 0;
          for (std::size_t nn = 0; nn < nodes.size(); ++nn) {
            const std::vector<Complex>& pn = pre[nn];
            double s = 0;
            for (int a = 0; a < n; ++a) {
              const int ra = spec.reflect_index(a);
              const Complex tx = txrow[ra];
              const Complex* prow = &pn[static_cast<std::size_t>(a) * n];
              for (int b = 0; b < n; ++b) {
                const Complex z = prow[b] * tx * tyrow[spec.reflect_index(b)];
                s += std::norm(z);
              }
            }
            acc += nodes[nn].weight * s;
          }
          raw.at(i, j) = acc;
        }
      }
    });
    return finalize_bruteforce(det, std::move(raw), SourceKind::spdc);
  }

  // Neither branch has its lens: the amplitude depends on x1 - x2 only, so
  // synthesize it once per node on the difference lattice.
  const int nd = 2 * n - 1;
  std::vector<double> usum(static_cast<std::size_t>(nd) * nd, 0.0);
  {
    std::vector<Complex> s(static_cast<std::size_t>(n) * n);
    for (const NuNode& node : nodes) {
      for (int qi = 0; qi < n; ++qi) {
        const int rqi = spec.reflect_index(qi);
        const double qx = qgrid.coord(qi);
        for (int qj = 0; qj < n; ++qj) {
          const int rqj = spec.reflect_index(qj);
          s[qgrid.index(qi, qj)] = spdc_spectrum(qx, qgrid.coord(qj), node.nu, p) *
                                   f1.at(qi, qj) * f2.at(rqi, rqj);
        }
      }
      const std::vector<Complex> u = synthesize_difference(s, qgrid, det, 1.0);
      for (std::size_t k = 0; k < u.size(); ++k) usum[k] += node.weight * std::norm(u[k]);
    }
  }
  parallel_blocks(n, nthreads, [&](int row_begin, int row_end) {
    for (int i = row_begin; i < row_end; ++i) {
      for (int j = 0; j < n; ++j) {
        if (!ap1[det.index(i, j)]) continue;
        double acc = 0;
        for (int a = 0; a < n; ++a) {
          const double* urow = &usum[static_cast<std::size_t>(i - a + n - 1) * nd + (n - 1)];
          const char* aprow = &ap2[det.index(a, 0)];
          for (int b = 0; b < n; ++b) {
            if (!aprow[b]) continue;
            acc += urow[j - b];
          }
        }
        raw.at(i, j) = acc;
      }
    }
  });
  return finalize_bruteforce(det, std::move(raw), SourceKind::spdc);
}

CoincidenceMap image_classical_bruteforce(const ObjectMask& g1, const ObjectMask& g2,
                                          const ClassicalSpectrum& s,
                                          const OpticalGeometry& geom,
                                          LensMode branch1, LensMode branch2,
                                          int threads) {
  check_masks(g1, g2);
  geom.validate();
  if (!s.even())
    throw PhysicsError("classical imaging requires an even momentum spectrum");
  const GridSpec& spec = g1.spec();
  const int n = spec.n;
  const GridSpec qgrid = geom.momentum_grid(spec);
  if (!(s.field().spec == qgrid))
    throw ConfigError("classical imaging: F is not sampled on the scenario momentum grid");
  const GridSpec det = geom.detector_grid(spec);

  const bool bucket_heavy =
      !(branch1 == LensMode::with_lens && branch2 == LensMode::with_lens);
  const std::int64_t n2 = static_cast<std::int64_t>(n) * n;
  const std::int64_t work = bucket_heavy ? n2 * n2 : n2;
  if (work > work_budget())
    throw ResourceError("bruteforce: estimated work " + std::to_string(work) +
                        " exceeds the budget; use a smaller grid (n = " +
                        std::to_string(n) + ")");

  const ComplexField f1 = g1.as_complex();
  const ComplexField f2 = g2.as_complex();
  const ComplexField& fq = s.field();
  const std::vector<Complex> quadx = quad_phase_x(det, geom);
  const std::vector<Complex> quadq = quad_phase_q(qgrid, geom);
  const std::vector<Complex> px = phase_table(qgrid, det);
  const std::vector<Complex> pxt = transpose_table(px, n);
  const std::vector<char> ap1 = aperture_mask(det, geom.pupil_radius1);
  const std::vector<char> ap2 = aperture_mask(det, geom.pupil_radius2);
  const double delta_amp = static_cast<double>(n);
  const int nthreads = effective_threads(threads);

  RealGrid raw(det);

  if (branch1 == LensMode::with_lens) {
    parallel_blocks(n, nthreads, [&](int row_begin, int row_end) {
      for (int i = row_begin; i < row_end; ++i) {
        const int ri = spec.reflect_index(i);
        for (int j = 0; j < n; ++j) {
          const std::size_t x1 = det.index(i, j);
          if (!ap1[x1]) continue;
          const int rj = spec.reflect_index(j);
          // e^{i q*.x1} on the diagonal of the phase tables.
          const Complex diag = px[static_cast<std::size_t>(i) * n + i] *
                               px[static_cast<std::size_t>(j) * n + j];
          const Complex base = fq.at(i, j) * quadx[x1] * quadq[qgrid.index(i, j)] *
                               f1.at(i, j) * delta_amp * diag;
          if (branch2 == LensMode::with_lens) {
            const std::size_t x2 = det.index(ri, rj);
            if (!ap2[x2]) continue;
            const Complex a = base *
                              std::conj(px[static_cast<std::size_t>(i) * n + ri]) *
                              std::conj(px[static_cast<std::size_t>(j) * n + rj]) *
                              quadx[x2] * quadq[qgrid.index(i, j)] * f2.at(ri, rj) * delta_amp;
            raw.at(i, j) = std::norm(a);
          } else {
            const Complex c0 = base * f2.at(ri, rj);
            const Complex* rowx = &px[static_cast<std::size_t>(i) * n];
            const Complex* rowy = &px[static_cast<std::size_t>(j) * n];
            double acc = 0;
            for (int a = 0; a < n; ++a) {
              const Complex cx = std::conj(rowx[a]);
              const Complex pa = c0 * cx * cx;
              const char* aprow = &ap2[det.index(a, 0)];
              for (int b = 0; b < n; ++b) {
                if (!aprow[b]) continue;
                const Complex cy = std::conj(rowy[b]);
                acc += std::norm(pa * cy * cy);
              }
            }
            raw.at(i, j) = acc;
          }
        }
      }
    });
    return finalize_bruteforce(det, std::move(raw), SourceKind::classical);
  }

  if (branch2 == LensMode::with_lens) {
    std::vector<Complex> pre(static_cast<std::size_t>(n) * n);
    for (int a = 0; a < n; ++a) {
      const int ra = spec.reflect_index(a);
      for (int b = 0; b < n; ++b) {
        const int rb = spec.reflect_index(b);
        const std::size_t x2 = det.index(a, b);
        if (!ap2[x2]) {
          pre[x2] = 0;
          continue;
        }
        pre[x2] = fq.at(ra, rb) * f1.at(ra, rb) * quadx[x2] *
                  quadq[qgrid.index(ra, rb)] * f2.at(a, b) * delta_amp *
                  std::conj(px[static_cast<std::size_t>(ra) * n + a]) *
                  std::conj(px[static_cast<std::size_t>(rb) * n + b]);
      }
    }
    parallel_blocks(n, nthreads, [&](int row_begin, int row_end) {
      for (int i = row_begin; i < row_end; ++i) {
        const Complex* txrow = &pxt[static_cast<std::size_t>(i) * n];
        for (int j = 0; j < n; ++j) {
          if (!ap1[det.index(i, j)]) continue;
          const Complex* tyrow = &pxt[static_cast<std::size_t>(j) * n];
          double acc = 0;
          for (int a = 0; a < n; ++a) {
            const Complex tx = txrow[spec.reflect_index(a)];
            const Complex tx2 = tx * tx;
            const Complex* prow = &pre[static_cast<std::size_t>(a) * n];
            for (int b = 0; b < n; ++b) {
              const Complex ty = tyrow[spec.reflect_index(b)];
              acc += std::norm(prow[b] * tx2 * ty * ty);
            }
          }
          raw.at(i, j) = acc;
        }
      }
    });
    return finalize_bruteforce(det, std::move(raw), SourceKind::classical);
  }

  // Neither lens: amplitude depends on x1 - x2 with doubled momentum phase.
  const int nd = 2 * n - 1;
  std::vector<double> usum(static_cast<std::size_t>(nd) * nd, 0.0);
  {
    std::vector<Complex> sgrid(static_cast<std::size_t>(n) * n);
    for (int qi = 0; qi < n; ++qi) {
      const int rqi = spec.reflect_index(qi);
      for (int qj = 0; qj < n; ++qj) {
        sgrid[qgrid.index(qi, qj)] =
            fq.at(qi, qj) * f1.at(qi, qj) * f2.at(rqi, spec.reflect_index(qj));
      }
    }
    const std::vector<Complex> u = synthesize_difference(sgrid, qgrid, det, 2.0);
    for (std::size_t k = 0; k < u.size(); ++k) usum[k] = std::norm(u[k]);
  }
  parallel_blocks(n, nthreads, [&](int row_begin, int row_end) {
    for (int i = row_begin; i < row_end; ++i) {
      for (int j = 0; j < n; ++j) {
        if (!ap1[det.index(i, j)]) continue;
        double acc = 0;
        for (int a = 0; a < n; ++a) {
          const double* urow = &usum[static_cast<std::size_t>(i - a + n - 1) * nd + (n - 1)];
          const char* aprow = &ap2[det.index(a, 0)];
          for (int b = 0; b < n; ++b) {
            if (!aprow[b]) continue;
            acc += urow[j - b];
          }
        }
        raw.at(i, j) = acc;
      }
    }
  });
  return finalize_bruteforce(det, std::move(raw), SourceKind::classical);
}

std::vector<CorrelationSample> correlate_scan(
    const ObjectMask& g1, const ObjectMask& g2,
    const std::vector<std::pair<int, int>>& displacements_px,
    const OpticalGeometry& geom, bool deinvert, double scale) {
  check_masks(g1, g2);
  geom.validate();
  const GridSpec& spec = g1.spec();
  const int n = spec.n;
  const GridSpec det = geom.detector_grid(spec);
  const RealGrid w1 = g1.intensity();
  const RealGrid w2 = g2.intensity();

  std::vector<CorrelationSample> out;
  out.reserve(displacements_px.size());
  for (const auto& [di, dj] : displacements_px) {
    double sum = 0;
    for (int i = 0; i < n; ++i) {
      const int ri = spec.reflect_index(i);
      for (int j = 0; j < n; ++j) {
        const double wb =
            deinvert ? w2.at(i, j) : w2.at(ri, spec.reflect_index(j));
        if (wb == 0.0) continue;
        const int a = i + di, b = j + dj;
        if (a < 0 || a >= n || b < 0 || b >= n)
          throw PhysicsError("correlate: displacement (" + std::to_string(di) + ", " +
                             std::to_string(dj) + ") pushes object-1 support off-grid");
        sum += w1.at(a, b) * wb;
      }
    }
    out.push_back({di, dj, di * det.pitch, dj * det.pitch, scale * sum});
  }
  return out;
}

double max_abs(const RealGrid& g) {
  double m = 0;
  for (double v : g.v) m = std::max(m, std::abs(v));
  return m;
}

double max_rel_diff(const RealGrid& a, const RealGrid& b) {
  if (!(a.spec == b.spec)) throw ConfigError("max_rel_diff: grid mismatch");
  const double denom = max_abs(b);
  double num = 0;
  for (std::size_t k = 0; k < a.v.size(); ++k)
    num = std::max(num, std::abs(a.v[k] - b.v[k]));
  if (denom == 0) return num == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / denom;
}

double coefficient_of_variation(const RealGrid& g) {
  const double count = static_cast<double>(g.v.size());
  double mean = 0;
  for (double v : g.v) mean += v;
  mean /= count;
  if (mean == 0) return 0;
  double var = 0;
  for (double v : g.v) var += (v - mean) * (v - mean);
  var /= count;
  return std::sqrt(var) / mean;
}

}  // namespace ghostsim
