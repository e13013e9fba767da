#include "ghostsim/runner.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "ghostsim/interferometer.hpp"
#include "ghostsim/pgm.hpp"
#include "ghostsim/version.hpp"

namespace ghostsim {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void atomic_write_text(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write " + tmp);
    out << content;
  }
  fs::rename(tmp, path);
}

struct Ctx {
  const Scenario* sc;
  std::string out_dir;
  int threads;
  std::vector<std::string> provenance;
  std::vector<std::string> artifacts;
};

void emit_pgm(Ctx& ctx, const std::string& name, const RealGrid& g) {
  const double peak = max_abs(g);
  std::vector<std::string> comments = ctx.provenance;
  comments.push_back("scale_max=" + fmt(peak));
  const std::string path = (fs::path(ctx.out_dir) / name).string();
  const std::string tmp = path + ".tmp";
  write_pgm16(tmp, g, peak, comments);
  fs::rename(tmp, path);
  ctx.artifacts.push_back(path);
}

void emit_text(Ctx& ctx, const std::string& name, const std::string& content) {
  const std::string path = (fs::path(ctx.out_dir) / name).string();
  atomic_write_text(path, content);
  ctx.artifacts.push_back(path);
}

void emit_csv(Ctx& ctx, const std::string& name, const std::string& body) {
  std::string content;
  for (const std::string& line : ctx.provenance) content += "# " + line + "\n";
  emit_text(ctx, name, content + body);
}

RealGrid pointwise_product(const RealGrid& a, const RealGrid& b) {
  RealGrid out(a.spec);
  for (std::size_t k = 0; k < out.v.size(); ++k) out.v[k] = a.v[k] * b.v[k];
  return out;
}

RealGrid normalized(const RealGrid& g) {
  RealGrid out = g;
  const double peak = max_abs(out);
  if (peak > 0)
    for (double& v : out.v) v /= peak;
  return out;
}

CoincidenceMap analytic_map(const Scenario& sc, const ObjectMask& g1,
                            const ObjectMask& g2, const std::string& base_dir) {
  if (sc.source.kind == SourceKind::spdc)
    return image_entangled_analytic(g1, g2, sc.source.spdc, sc.geometry);
  const ClassicalSpectrum s = realize_classical(sc.source, sc.grid, sc.geometry, base_dir);
  return image_classical(g1, g2, s, sc.geometry);
}

CoincidenceMap bruteforce_map(const Scenario& sc, const ObjectMask& g1,
                              const ObjectMask& g2, LensMode b1, LensMode b2,
                              const std::string& base_dir, int threads) {
  if (sc.source.kind == SourceKind::spdc)
    return image_entangled_bruteforce(g1, g2, sc.source.spdc, sc.geometry, b1, b2, threads);
  const ClassicalSpectrum s = realize_classical(sc.source, sc.grid, sc.geometry, base_dir);
  return image_classical_bruteforce(g1, g2, s, sc.geometry, b1, b2, threads);
}

std::vector<std::pair<int, int>> default_bc_pixels(int n) {
  return {{n / 2, n / 2},
          {n / 2 + n / 8, n / 2},
          {n / 2, n / 2 + n / 8},
          {n / 2 - n / 8, n / 2 + n / 16},
          {n / 2 + n / 4, n / 2 + n / 4},
          {n / 2 - 3, n / 2 - 1}};
}

ordered_json run_image(Ctx& ctx, const ObjectMask& g1, const ObjectMask& g2,
                       const std::string& image_path, LensMode b1, LensMode b2) {
  const Scenario& sc = *ctx.sc;
  ordered_json metrics;

  const ObjectMask bare1 = g1.phase_free();
  const ObjectMask bare2 = g2.phase_free();
  const CoincidenceMap reference = analytic_map(sc, bare1, bare2, sc.base_dir);
  const RealGrid reference_norm = reference.peak_normalized();

  const bool want_analytic = image_path == "analytic" || image_path == "both";
  const bool want_brute = image_path == "bruteforce" || image_path == "both";

  bool phase_residual_measured = false;
  double phase_residual_primary = 0;
  if (want_analytic) {
    const CoincidenceMap amap = analytic_map(sc, g1, g2, sc.base_dir);
    emit_pgm(ctx, "map_analytic.pgm", amap.rates);
    metrics["max"] = amap.path == ImagePath::analytic ? max_abs(amap.rates) : amap.norm;
    metrics["cv"] = coefficient_of_variation(amap.rates);
    const double resid = max_rel_diff(amap.peak_normalized(), reference_norm);
    metrics["phase_cancellation_residual_analytic"] = resid;
    phase_residual_primary = resid;
    phase_residual_measured = true;

    // Factorization of the closed form: image(A, B) against the pointwise
    // product of the single-object images.
    const ObjectMask unit = make_unit_mask(sc.grid);
    const CoincidenceMap a_only = analytic_map(sc, g1, unit, sc.base_dir);
    const CoincidenceMap b_only = analytic_map(sc, unit, g2, sc.base_dir);
    const RealGrid product = pointwise_product(a_only.rates, b_only.rates);
    metrics["product_structure_residual"] =
        max_rel_diff(normalized(product), amap.peak_normalized());

    // Ghost inversion: image(1, B) equals the reflected image(B, 1).
    const CoincidenceMap swapped = analytic_map(sc, g2, unit, sc.base_dir);
    metrics["inversion_residual"] =
        max_rel_diff(b_only.rates, reflect(swapped.rates));
  }

  if (want_brute) {
    const CoincidenceMap bmap = bruteforce_map(sc, g1, g2, b1, b2, sc.base_dir, ctx.threads);
    emit_pgm(ctx, "map_bruteforce.pgm", bmap.rates);
    metrics["bruteforce_peak"] = bmap.norm;
    metrics["bruteforce_cv"] = coefficient_of_variation(bmap.rates);
    metrics["vignetted"] = bmap.vignetted;
    const bool both_lenses_on =
        b1 == LensMode::with_lens && b2 == LensMode::with_lens;
    if (both_lenses_on) {
      const double resid = max_rel_diff(bmap.peak_normalized(), reference_norm);
      metrics["phase_cancellation_residual_bruteforce"] = resid;
      phase_residual_primary = resid;
      phase_residual_measured = true;
    }
    if (!metrics.contains("max")) metrics["max"] = bmap.norm;
    if (!metrics.contains("cv")) metrics["cv"] = coefficient_of_variation(bmap.rates);
  }

  if (phase_residual_measured)
    metrics["phase_cancellation_residual"] = phase_residual_primary;

  if (sc.source.kind == SourceKind::spdc) {
    const BcSpread bc = bc_constancy(sc.source.spdc, sc.geometry, sc.grid,
                                     default_bc_pixels(sc.grid.n));
    metrics["bc_spread_b"] = bc.b_spread;
    metrics["bc_spread_c"] = bc.c_spread;
  }
  return metrics;
}

ordered_json run_interfere(Ctx& ctx, const ObjectMask& g1, const ObjectMask& g2,
                           double tau_min, double tau_max, int steps) {
  const Scenario& sc = *ctx.sc;
  if (sc.source.kind != SourceKind::spdc)
    throw ConfigError("interfere experiment requires the spdc source");
  const SpdcParams& p = sc.source.spdc;
  const double dl = p.group_delay * p.crystal_length;
  if (tau_min == 0 && tau_max == 0) {
    tau_min = -0.5 * dl;
    tau_max = 1.5 * dl;
  }
  if (steps < 2) throw ConfigError("interfere: steps must be >= 2");

  std::vector<double> taus(steps);
  for (int k = 0; k < steps; ++k)
    taus[k] = tau_min + k * (tau_max - tau_min) / (steps - 1);

  const TauScan scan = rate_scan(taus, g1, g2, p, sc.geometry, ctx.threads);

  std::string csv = "tau,R,ReW,ImW\n";
  for (std::size_t k = 0; k < taus.size(); ++k) {
    csv += fmt(scan.taus[k]) + "," + fmt(scan.rates[k]) + "," +
           fmt(scan.w[k].real()) + "," + fmt(scan.w[k].imag()) + "\n";
  }
  emit_csv(ctx, "interfere.csv", csv);

  ordered_json metrics;
  metrics["r0"] = scan.r0;
  std::size_t imin = 0;
  double baseline_residual = 0;
  double tau_lo = NAN, tau_hi = NAN;
  for (std::size_t k = 0; k < taus.size(); ++k) {
    if (scan.rates[k] < scan.rates[imin]) imin = k;
    if (taus[k] < 0.0 || taus[k] > dl) {
      baseline_residual = std::max(
          baseline_residual, std::abs(scan.rates[k] - scan.r0) / scan.r0);
    }
    if (scan.rates[k] < scan.r0 * (1.0 - 1e-12)) {
      if (std::isnan(tau_lo)) tau_lo = taus[k];
      tau_hi = taus[k];
    }
  }
  metrics["dip_center"] = taus[imin];
  metrics["dip_depth"] = (scan.r0 - scan.rates[imin]) / scan.r0;
  // Bin-width corrected support estimate: the true base extends up to half a
  // step beyond the outermost dipped nodes on each side.
  const double step = (tau_max - tau_min) / (steps - 1);
  const double width = std::isnan(tau_lo) ? 0.0 : (tau_hi - tau_lo) + step;
  metrics["dip_width"] = width;
  metrics["dip_width_error"] = std::abs(width - dl);
  metrics["baseline_residual"] = baseline_residual;

  const auto any_phase = [](const ObjectMask& g) {
    for (double v : g.phase().v)
      if (v != 0.0) return true;
    return false;
  };
  const bool has_screens = any_phase(g1) || any_phase(g2);
  if (has_screens) {
    const TauScan ref = rate_scan(taus, g1.phase_free(), g2.phase_free(), p,
                                  sc.geometry, ctx.threads);
    double wres = 0;
    for (std::size_t k = 0; k < taus.size(); ++k)
      wres = std::max(wres, std::abs(scan.w[k] - ref.w[k]));
    metrics["screen_w_residual"] = wres;
  }
  return metrics;
}

ordered_json run_correlate(Ctx& ctx, const ObjectMask& g1, const ObjectMask& g2,
                           int rmax_px, int rsteps, bool deinvert) {
  const Scenario& sc = *ctx.sc;
  if (rmax_px < 0 || rsteps < 1)
    throw ConfigError("correlate: need rmax >= 0 and rsteps >= 1");
  std::vector<std::pair<int, int>> disp;
  std::vector<int> offsets;
  for (int k = -rsteps; k <= rsteps; ++k)
    offsets.push_back(static_cast<int>(std::lround(double(k) * rmax_px / rsteps)));
  for (int di : offsets)
    for (int dj : offsets) disp.emplace_back(di, dj);

  const double scale = sc.source.kind == SourceKind::spdc
                           ? analytic_norm_constant(sc.source.spdc)
                           : 1.0;
  const auto samples = correlate_scan(g1, g2, disp, sc.geometry, deinvert, scale);

  std::string csv = "rx,ry,g\n";
  double gmax = 0, g0 = 0;
  double gmax_rx = 0, gmax_ry = 0;
  for (const CorrelationSample& s : samples) {
    csv += fmt(s.rx) + "," + fmt(s.ry) + "," + fmt(s.g) + "\n";
    if (s.g > gmax) {
      gmax = s.g;
      gmax_rx = s.rx;
      gmax_ry = s.ry;
    }
    if (s.di == 0 && s.dj == 0) g0 = s.g;
  }
  emit_csv(ctx, "correlate.csv", csv);

  ordered_json metrics;
  metrics["g_max"] = gmax;
  metrics["g_at_zero"] = g0;
  metrics["g_max_rx"] = gmax_rx;
  metrics["g_max_ry"] = gmax_ry;
  metrics["samples"] = samples.size();
  return metrics;
}

ordered_json run_lens_study(Ctx& ctx, const ObjectMask& g1, const ObjectMask& g2) {
  const Scenario& sc = *ctx.sc;
  const CoincidenceMap both = bruteforce_map(sc, g1, g2, LensMode::with_lens,
                                             LensMode::with_lens, sc.base_dir, ctx.threads);
  const CoincidenceMap no1 = bruteforce_map(sc, g1, g2, LensMode::without_lens,
                                            LensMode::with_lens, sc.base_dir, ctx.threads);
  const CoincidenceMap no2 = bruteforce_map(sc, g1, g2, LensMode::with_lens,
                                            LensMode::without_lens, sc.base_dir, ctx.threads);
  emit_pgm(ctx, "map_both_lenses.pgm", both.rates);
  emit_pgm(ctx, "map_branch1_lens_off.pgm", no1.rates);
  emit_pgm(ctx, "map_branch2_lens_off.pgm", no2.rates);

  ordered_json metrics;
  metrics["max"] = both.norm;
  metrics["cv_branch1_lens_off"] = coefficient_of_variation(no1.rates);
  metrics["reldiff_branch2_lens_off"] = max_rel_diff(no2.rates, both.rates);
  return metrics;
}

}  // namespace

RunResult run_scenario(const Scenario& sc, const std::string& out_dir,
                       const RunOverrides& ov, int threads) {
  fs::create_directories(out_dir);
  Ctx ctx;
  ctx.sc = &sc;
  ctx.out_dir = out_dir;
  ctx.threads = threads;
  ctx.provenance = {"ghostsim " + std::string(kVersion),
                    "scenario_hash=" + hex64(sc.scenario_hash),
                    "seed=" + std::to_string(sc.seed)};

  const ObjectMask g1 = realize_mask(sc.mask1, sc.grid, sc.seed, sc.base_dir);
  const ObjectMask g2 = realize_mask(sc.mask2, sc.grid, sc.seed + 1, sc.base_dir);

  const ExperimentType experiment = ov.experiment.value_or(sc.experiment);
  ordered_json metrics;
  switch (experiment) {
    case ExperimentType::image:
      metrics = run_image(ctx, g1, g2, ov.image_path.value_or(sc.image_path),
                          ov.branch1.value_or(sc.branch1), ov.branch2.value_or(sc.branch2));
      break;
    case ExperimentType::interfere:
      metrics = run_interfere(ctx, g1, g2, ov.tau_min.value_or(sc.tau_min),
                              ov.tau_max.value_or(sc.tau_max),
                              ov.tau_steps.value_or(sc.tau_steps));
      break;
    case ExperimentType::correlate:
      metrics = run_correlate(ctx, g1, g2, ov.rmax_px.value_or(sc.rmax_px),
                              ov.rsteps.value_or(sc.rsteps),
                              ov.deinvert.value_or(sc.deinvert));
      break;
    case ExperimentType::lens_study:
      metrics = run_lens_study(ctx, g1, g2);
      break;
  }

  RunResult result;
  result.summary["tool"] = "ghostsim";
  result.summary["version"] = std::string(kVersion);
  result.summary["scenario_hash"] = hex64(sc.scenario_hash);
  result.summary["seed"] = sc.seed;
  switch (experiment) {
    case ExperimentType::image: result.summary["experiment"] = "image"; break;
    case ExperimentType::interfere: result.summary["experiment"] = "interfere"; break;
    case ExperimentType::correlate: result.summary["experiment"] = "correlate"; break;
    case ExperimentType::lens_study: result.summary["experiment"] = "lens-study"; break;
  }
  result.summary["source"] = sc.source.kind == SourceKind::spdc ? "spdc" : "classical";
  if (std::isfinite(sc.geometry.pupil_radius1) || std::isfinite(sc.geometry.pupil_radius2))
    result.summary["note"] = "finite detection pupils are experimental";
  result.summary["metrics"] = metrics;

  // In-scenario assertions: metric <= bound.
  bool all_ok = true;
  if (!sc.assertions.empty()) {
    ordered_json checks = ordered_json::array();
    for (const AssertionSpec& a : sc.assertions) {
      if (!metrics.contains(a.metric))
        throw ConfigError("assert: unknown metric '" + a.metric + "'");
      const double value = metrics[a.metric].get<double>();
      const bool ok = value <= a.bound;
      all_ok = all_ok && ok;
      checks.push_back({{"metric", a.metric}, {"value", value}, {"bound", a.bound}, {"passed", ok}});
    }
    result.summary["assertions"] = checks;
  }

  std::vector<std::string> names;
  for (const std::string& a : ctx.artifacts) names.push_back(fs::path(a).filename().string());
  result.summary["artifacts"] = names;

  atomic_write_text((fs::path(out_dir) / "metrics.json").string(), result.summary.dump(2) + "\n");
  ctx.artifacts.push_back((fs::path(out_dir) / "metrics.json").string());

  result.artifacts = ctx.artifacts;
  result.exit_code = all_ok ? 0 : 1;
  return result;
}

}  // namespace ghostsim
