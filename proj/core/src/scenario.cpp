#include "ghostsim/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "ghostsim/pgm.hpp"
#include "ghostsim/version.hpp"

namespace ghostsim {

namespace {

namespace fs = std::filesystem;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

/// Splits on top-level commas only; commas nested in () or {} stay put.
std::vector<std::string> split_top_level(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(' || c == '{') ++depth;
    if (c == ')' || c == '}') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_number(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    if (trim(s) == "inf") return std::numeric_limits<double>::infinity();
    const double v = std::stod(trim(s), &pos);
    if (pos != trim(s).size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("scenario: cannot parse number '" + s + "' in " + where);
  }
}

/// "name{k=v, k=v}" or "name(arg)" or bare "name"; returns name and payload.
struct Callish {
  std::string name;
  std::string payload;  // inside {...} or (...)
  char bracket = 0;
};

Callish parse_callish(const std::string& s, const std::string& where) {
  Callish c;
  const std::string t = trim(s);
  const auto brace = t.find_first_of("{(");
  if (brace == std::string::npos) {
    c.name = t;
    return c;
  }
  c.name = trim(t.substr(0, brace));
  c.bracket = t[brace];
  const char close = c.bracket == '{' ? '}' : ')';
  if (t.back() != close)
    throw ConfigError("scenario: unbalanced brackets in " + where + ": '" + s + "'");
  c.payload = t.substr(brace + 1, t.size() - brace - 2);
  return c;
}

std::map<std::string, std::string> parse_kv_list(const std::string& payload,
                                                 const std::string& where) {
  std::map<std::string, std::string> kv;
  for (std::string item : split_top_level(payload)) {
    item = trim(item);
    if (item.empty()) continue;
    // Both "key=value" and "key: value" spellings are accepted.
    const auto eq = item.find_first_of("=:");
    if (eq == std::string::npos)
      throw ConfigError("scenario: expected key=value in " + where + ": '" + item + "'");
    kv[trim(item.substr(0, eq))] = trim(item.substr(eq + 1));
  }
  return kv;
}

double require_number(const std::map<std::string, std::string>& kv,
                      const std::string& key, const std::string& where) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw ConfigError("scenario: missing '" + key + "' in " + where);
  return parse_number(it->second, where);
}

SourceSpec parse_source(const std::string& value) {
  SourceSpec src;
  const Callish c = parse_callish(value, "[source]");
  if (c.name == "spdc") {
    const auto kv = parse_kv_list(c.payload, "source = spdc{...}");
    src.kind = SourceKind::spdc;
    src.spdc.crystal_length = require_number(kv, "L", "spdc");
    src.spdc.group_delay = require_number(kv, "D", "spdc");
    src.spdc.walkoff = require_number(kv, "M", "spdc");
    src.spdc.k_pump = require_number(kv, "k_pump", "spdc");
    src.spdc.omega0 = require_number(kv, "omega0", "spdc");
    src.spdc.bandwidth = require_number(kv, "bandwidth", "spdc");
    src.spdc.n_nu = static_cast<int>(require_number(kv, "n_nu", "spdc"));
    src.spdc.validate();
    return src;
  }
  if (c.name == "classical") {
    const auto kv = parse_kv_list(c.payload, "source = classical{...}");
    src.kind = SourceKind::classical;
    const auto it = kv.find("F");
    if (it == kv.end()) throw ConfigError("scenario: classical source needs F=...");
    const Callish f = parse_callish(it->second, "classical F");
    if (f.name == "uniform") {
      src.classical_kind = SourceSpec::ClassicalKind::uniform;
    } else if (f.name == "gaussian") {
      src.classical_kind = SourceSpec::ClassicalKind::gaussian;
      src.sigma_q = parse_number(f.payload, "classical F=gaussian");
    } else if (f.name == "file") {
      src.classical_kind = SourceSpec::ClassicalKind::file;
      src.f_path = trim(f.payload);
    } else {
      throw ConfigError("scenario: unknown classical spectrum '" + f.name + "'");
    }
    return src;
  }
  throw ConfigError("scenario: unknown source '" + c.name + "'");
}

void parse_mask_line(MaskSpec& ms, const std::string& value) {
  const Callish c = parse_callish(value, "mask");
  if (c.name == "unit") {
    ms.kind = MaskSpec::Kind::unit;
  } else if (c.name == "pinhole") {
    ms.kind = MaskSpec::Kind::pinhole;
  } else if (c.name == "disk") {
    ms.kind = MaskSpec::Kind::disk;
    ms.param = parse_number(c.payload, "disk(a)");
  } else if (c.name == "slit") {
    ms.kind = MaskSpec::Kind::slit;
    ms.param = parse_number(c.payload, "slit(w)");
  } else if (c.name == "glyph") {
    ms.kind = MaskSpec::Kind::glyph;
    ms.param = parse_number(c.payload, "glyph(h)");
  } else if (c.name == "letter") {
    ms.kind = MaskSpec::Kind::letter;
    ms.path = trim(c.payload);
  } else if (c.name == "pgm") {
    ms.kind = MaskSpec::Kind::pgm;
    ms.path = trim(c.payload);
  } else {
    throw ConfigError("scenario: unknown mask generator '" + c.name + "'");
  }
}

void parse_screen_line(MaskSpec& ms, const std::string& value) {
  for (std::string item : split_top_level(value)) {
    item = trim(item);
    if (item.empty()) continue;
    const Callish c = parse_callish(item, "screen");
    if (c.name == "random" && c.bracket == '(') {
      const auto comma = c.payload.find(',');
      if (comma == std::string::npos)
        throw ConfigError("scenario: screen random(count, max_weight)");
      ms.random_modes = static_cast<int>(parse_number(c.payload.substr(0, comma), "screen random"));
      ms.random_max_weight = parse_number(c.payload.substr(comma + 1), "screen random");
      continue;
    }
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw ConfigError("scenario: screen entries are mode:weight, got '" + item + "'");
    const std::string name = trim(item.substr(0, colon));
    const double w = parse_number(item.substr(colon + 1), "screen weight");
    ms.screen.add(name, w);
  }
}

ExperimentType parse_experiment_type(const std::string& v) {
  if (v == "image") return ExperimentType::image;
  if (v == "interfere") return ExperimentType::interfere;
  if (v == "correlate") return ExperimentType::correlate;
  if (v == "lens-study" || v == "lens_study") return ExperimentType::lens_study;
  throw ConfigError("scenario: unknown experiment type '" + v + "'");
}

LensMode parse_lens(const std::string& v) {
  if (v == "on") return LensMode::with_lens;
  if (v == "off") return LensMode::without_lens;
  throw ConfigError("scenario: lens flags are on|off, got '" + v + "'");
}

std::string resolve(const std::string& base_dir, const std::string& path) {
  fs::path p(path);
  if (p.is_absolute()) return path;
  return (fs::path(base_dir) / p).string();
}

}  // namespace

Scenario parse_scenario_text(const std::string& text, const std::string& base_dir) {
  Scenario sc;
  sc.base_dir = base_dir;
  sc.scenario_hash = fnv1a64(text.data(), text.size());

  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  bool have_grid = false, have_geometry = false, have_source = false;
  auto fail = [&](const std::string& msg) {
    throw ConfigError("scenario:" + std::to_string(lineno) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }

    if (section == "assert") {
      const auto le = line.find("<=");
      if (le == std::string::npos) fail("assertions are 'metric <= bound'");
      sc.assertions.push_back(
          {trim(line.substr(0, le)), parse_number(line.substr(le + 2), "[assert]")});
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (section == "grid") {
      if (key == "n") sc.grid.n = static_cast<int>(parse_number(value, "[grid] n"));
      else if (key == "pitch") sc.grid.pitch = parse_number(value, "[grid] pitch");
      else fail("unknown [grid] key '" + key + "'");
      have_grid = true;
    } else if (section == "geometry") {
      if (key == "f") sc.geometry.f = parse_number(value, "[geometry] f");
      else if (key == "f_d") sc.geometry.f_d = parse_number(value, "[geometry] f_d");
      else if (key == "k") sc.geometry.k = parse_number(value, "[geometry] k");
      else if (key == "d1") sc.geometry.d1 = parse_number(value, "[geometry] d1");
      else if (key == "d2") sc.geometry.d2 = parse_number(value, "[geometry] d2");
      else if (key == "pupil_radius1") sc.geometry.pupil_radius1 = parse_number(value, "pupil_radius1");
      else if (key == "pupil_radius2") sc.geometry.pupil_radius2 = parse_number(value, "pupil_radius2");
      else fail("unknown [geometry] key '" + key + "'");
      have_geometry = true;
    } else if (section == "source") {
      if (key != "source") fail("unknown [source] key '" + key + "'");
      sc.source = parse_source(value);
      have_source = true;
    } else if (section == "mask1" || section == "mask2") {
      MaskSpec& ms = section == "mask1" ? sc.mask1 : sc.mask2;
      if (key == "mask") parse_mask_line(ms, value);
      else if (key == "screen") parse_screen_line(ms, value);
      else if (key == "phase_file") ms.phase_raw = value;
      else fail("unknown [" + section + "] key '" + key + "'");
    } else if (section == "experiment") {
      if (key == "type") sc.experiment = parse_experiment_type(value);
      else if (key == "seed") sc.seed = static_cast<std::uint64_t>(parse_number(value, "seed"));
      else if (key == "path") {
        if (value != "analytic" && value != "bruteforce" && value != "both")
          fail("path must be analytic|bruteforce|both");
        sc.image_path = value;
      } else if (key == "branch1_lens") sc.branch1 = parse_lens(value);
      else if (key == "branch2_lens") sc.branch2 = parse_lens(value);
      else if (key == "tau_min") sc.tau_min = parse_number(value, "tau_min");
      else if (key == "tau_max") sc.tau_max = parse_number(value, "tau_max");
      else if (key == "steps") sc.tau_steps = static_cast<int>(parse_number(value, "steps"));
      else if (key == "rmax") sc.rmax_px = static_cast<int>(parse_number(value, "rmax"));
      else if (key == "rsteps") sc.rsteps = static_cast<int>(parse_number(value, "rsteps"));
      else if (key == "deinvert") sc.deinvert = (value == "true" || value == "on" || value == "1");
      else fail("unknown [experiment] key '" + key + "'");
    } else if (section.empty()) {
      fail("key outside any [section]");
    } else {
      fail("unknown section [" + section + "]");
    }
  }

  if (!have_grid) throw ConfigError("scenario: missing [grid] section");
  if (!have_geometry) throw ConfigError("scenario: missing [geometry] section");
  if (!have_source) throw ConfigError("scenario: missing [source] section");
  sc.grid.validate();
  sc.geometry.validate();
  return sc;
}

Scenario parse_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scenario " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), fs::path(path).parent_path().string());
}

PhaseScreen random_screen(std::uint64_t seed, double max_weight) {
  static const char* kPool[] = {"tilt_x", "tilt_y",  "defocus",   "astig",
                                "astig45", "coma_x", "coma_y",    "trefoil",
                                "trefoil45", "spherical"};
  std::mt19937_64 rng(seed);
  PhaseScreen s;
  for (const char* name : kPool) {
    // Uniform in [-max_weight, max_weight] via the top 53 bits; avoids the
    // implementation-defined std distributions.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    s.add(name, (2.0 * u - 1.0) * max_weight);
  }
  return s;
}

ObjectMask realize_mask(const MaskSpec& ms, const GridSpec& grid,
                        std::uint64_t seed, const std::string& base_dir) {
  ObjectMask mask = [&]() -> ObjectMask {
    switch (ms.kind) {
      case MaskSpec::Kind::unit: return make_unit_mask(grid);
      case MaskSpec::Kind::pinhole: return make_pinhole_mask(grid);
      case MaskSpec::Kind::disk: return make_disk_mask(grid, ms.param);
      case MaskSpec::Kind::slit: return make_slit_mask(grid, ms.param);
      case MaskSpec::Kind::glyph: return make_letter_f_mask(grid, ms.param);
      case MaskSpec::Kind::letter:
      case MaskSpec::Kind::pgm: {
        RealGrid t = read_amplitude_pgm(resolve(base_dir, ms.path), grid.pitch);
        if (!(t.spec == grid))
          throw ConfigError("mask file " + ms.path + " does not match the scenario grid");
        return ObjectMask(std::move(t));
      }
    }
    throw ConfigError("mask: unhandled generator");
  }();

  if (!ms.screen.empty()) mask = mask.with_screen(ms.screen);
  if (ms.random_modes > 0)
    mask = mask.with_screen(random_screen(seed, ms.random_max_weight));
  if (!ms.phase_raw.empty()) {
    RealGrid phi = read_raw_grid(resolve(base_dir, ms.phase_raw));
    if (!(phi.spec == grid))
      throw ConfigError("phase file " + ms.phase_raw + " does not match the scenario grid");
    mask = mask.with_phase(phi);
  }
  return mask;
}

ClassicalSpectrum realize_classical(const SourceSpec& src, const GridSpec& grid,
                                    const OpticalGeometry& geom,
                                    const std::string& base_dir) {
  const GridSpec qgrid = geom.momentum_grid(grid);
  switch (src.classical_kind) {
    case SourceSpec::ClassicalKind::uniform:
      return ClassicalSpectrum::uniform(qgrid);
    case SourceSpec::ClassicalKind::gaussian:
      return ClassicalSpectrum::gaussian(qgrid, src.sigma_q);
    case SourceSpec::ClassicalKind::file: {
      RealGrid t = read_amplitude_pgm(resolve(base_dir, src.f_path), qgrid.pitch);
      if (t.spec.n != qgrid.n)
        throw ConfigError("classical spectrum file does not match the momentum grid");
      ComplexField f(qgrid);
      for (std::size_t k = 0; k < t.v.size(); ++k) f.v[k] = t.v[k];
      return ClassicalSpectrum(std::move(f));
    }
  }
  throw ConfigError("classical source: unhandled spectrum kind");
}

}  // namespace ghostsim
