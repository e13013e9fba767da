#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <unistd.h>

#include "ghostsim/pgm.hpp"

using namespace ghostsim;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("ghostsim_pgm_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("pgm16 round trip preserves quantized values and header comments") {
  TempDir tmp;
  const GridSpec spec(32, 1e-6);
  RealGrid g(spec);
  std::mt19937_64 rng(5);
  for (double& v : g.v) v = static_cast<double>(rng() % 65536);

  const std::string path = (tmp.path / "map.pgm").string();
  write_pgm16(path, g, 65535.0, {"scenario_hash=deadbeef", "seed=7"});

  const Pgm16 img = read_pgm16(path);
  REQUIRE(img.width == 32);
  REQUIRE(img.height == 32);
  for (std::size_t k = 0; k < g.v.size(); ++k)
    CHECK(img.samples[k] == static_cast<std::uint16_t>(g.v[k]));

  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text.find("# scenario_hash=deadbeef") != std::string::npos);
}

TEST_CASE("amplitude pgm loads as transmittance in [0,1]") {
  TempDir tmp;
  const GridSpec spec(16, 2e-6);
  RealGrid g(spec);
  g.at(8, 8) = 1.0;
  g.at(1, 2) = 0.5;
  const std::string path = (tmp.path / "mask.pgm").string();
  write_pgm16(path, g, 1.0, {});

  const RealGrid t = read_amplitude_pgm(path, 2e-6);
  CHECK(t.spec.n == 16);
  CHECK(t.spec.pitch == 2e-6);
  CHECK(t.at(8, 8) == 1.0);
  CHECK(t.at(1, 2) == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(t.at(0, 0) == 0.0);
}

TEST_CASE("raw float64 grid round trips through the sidecar header") {
  TempDir tmp;
  const GridSpec spec(16, 0.5e-6);
  RealGrid g(spec);
  std::mt19937_64 rng(11);
  for (double& v : g.v) v = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;

  const std::string path = (tmp.path / "phase.f64").string();
  write_raw_grid(path, g);
  const RealGrid back = read_raw_grid(path);
  CHECK(back.spec.n == 16);
  CHECK(back.spec.pitch == 0.5e-6);
  for (std::size_t k = 0; k < g.v.size(); ++k) CHECK(back.v[k] == g.v[k]);
}

TEST_CASE("pgm reader rejects malformed files") {
  TempDir tmp;
  const std::string path = (tmp.path / "bad.pgm").string();
  {
    std::ofstream out(path);
    out << "P2\n4 4\n255\n";
  }
  CHECK_THROWS_AS(read_pgm16(path), IoError);
  CHECK_THROWS_AS(read_pgm16((tmp.path / "missing.pgm").string()), IoError);
}
