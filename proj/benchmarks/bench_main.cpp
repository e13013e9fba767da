#include <benchmark/benchmark.h>

#include "ghostsim/imaging.hpp"
#include "ghostsim/interferometer.hpp"
#include "ghostsim/scenario.hpp"

namespace {

using namespace ghostsim;

OpticalGeometry bench_geometry() {
  OpticalGeometry g;
  g.f = 1.0;
  g.f_d = 1.0;
  g.d1 = 1.0;
  g.d2 = 1.0;
  g.k = 1e7;
  return g;
}

SpdcParams bench_spdc() {
  SpdcParams p;
  p.crystal_length = 1e-3;
  p.group_delay = 1e-10;
  p.walkoff = 0.05;
  p.k_pump = 2e7;
  p.omega0 = 3e15;
  p.bandwidth = 6e13;
  p.n_nu = 9;
  return p;
}

void RenderPhaseScreen(benchmark::State& state) {
  const GridSpec spec(static_cast<int>(state.range(0)), 1e-6);
  const PhaseScreen screen = random_screen(11, 2.0);
  for (auto _ : state) {
    RealGrid phi = render_phase_screen(screen, spec);
    benchmark::DoNotOptimize(phi.v.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(RenderPhaseScreen)->RangeMultiplier(2)->Range(64, 512)->Complexity();

void AnalyticImage(benchmark::State& state) {
  const GridSpec spec(static_cast<int>(state.range(0)), 1e-6);
  const OpticalGeometry geom = bench_geometry();
  const SpdcParams p = bench_spdc();
  const ObjectMask g1 = make_disk_mask(spec, spec.n / 6 * spec.pitch);
  const ObjectMask g2 = make_slit_mask(spec, spec.n / 5 * spec.pitch);
  for (auto _ : state) {
    CoincidenceMap map = image_entangled_analytic(g1, g2, p, geom);
    benchmark::DoNotOptimize(map.rates.v.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(AnalyticImage)->RangeMultiplier(2)->Range(64, 512)->Complexity();

void BruteforceBothLenses(benchmark::State& state) {
  const GridSpec spec(static_cast<int>(state.range(0)), 1e-6);
  const OpticalGeometry geom = bench_geometry();
  const SpdcParams p = bench_spdc();
  const ObjectMask g1 = make_disk_mask(spec, spec.n / 6 * spec.pitch);
  const ObjectMask g2 = make_slit_mask(spec, spec.n / 5 * spec.pitch);
  for (auto _ : state) {
    CoincidenceMap map = image_entangled_bruteforce(
        g1, g2, p, geom, LensMode::with_lens, LensMode::with_lens);
    benchmark::DoNotOptimize(map.rates.v.data());
  }
}
BENCHMARK(BruteforceBothLenses)->RangeMultiplier(2)->Range(64, 256)->Unit(benchmark::kMillisecond);

void BruteforceBucketSum(benchmark::State& state) {
  const GridSpec spec(static_cast<int>(state.range(0)), 1e-6);
  const OpticalGeometry geom = bench_geometry();
  const SpdcParams p = bench_spdc();
  const ObjectMask g1 = make_disk_mask(spec, spec.n / 6 * spec.pitch);
  const ObjectMask g2 = make_slit_mask(spec, spec.n / 5 * spec.pitch);
  for (auto _ : state) {
    CoincidenceMap map = image_entangled_bruteforce(
        g1, g2, p, geom, LensMode::without_lens, LensMode::with_lens);
    benchmark::DoNotOptimize(map.rates.v.data());
  }
}
BENCHMARK(BruteforceBucketSum)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BackgroundRate(benchmark::State& state) {
  const GridSpec spec(static_cast<int>(state.range(0)), 1e-6);
  const OpticalGeometry geom = bench_geometry();
  const ObjectMask g1 = make_disk_mask(spec, spec.n / 6 * spec.pitch);
  const ObjectMask g2 = make_slit_mask(spec, spec.n / 5 * spec.pitch);
  for (auto _ : state) {
    benchmark::DoNotOptimize(background_r0(g1, g2, geom));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BackgroundRate)->RangeMultiplier(2)->Range(64, 512)->Complexity();

void ModulationScan(benchmark::State& state) {
  const GridSpec spec(128, 1e-6);
  const OpticalGeometry geom = bench_geometry();
  const SpdcParams p = bench_spdc();
  const ObjectMask g1 = make_disk_mask(spec, 20e-6);
  const ObjectMask g2 = make_slit_mask(spec, 24e-6);
  const double dl = p.group_delay * p.crystal_length;
  std::vector<double> taus(static_cast<std::size_t>(state.range(0)));
  for (std::size_t k = 0; k < taus.size(); ++k)
    taus[k] = dl * static_cast<double>(k) / (taus.size() - 1);
  for (auto _ : state) {
    TauScan scan = rate_scan(taus, g1, g2, p, geom);
    benchmark::DoNotOptimize(scan.rates.data());
  }
}
BENCHMARK(ModulationScan)->Arg(11)->Arg(101)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
