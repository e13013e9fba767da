#include "ghostsim/pgm.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ghostsim/error.hpp"

namespace ghostsim {

namespace {

void skip_pgm_whitespace(std::istream& in) {
  for (;;) {
    int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

double read_header_value(const std::string& hdr_path, const std::string& key) {
  std::ifstream in(hdr_path);
  if (!in) throw IoError("cannot open raw-grid header " + hdr_path);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string k, eq;
    double v;
    if (ls >> k >> eq >> v && k == key && eq == "=") return v;
  }
  throw IoError("raw-grid header " + hdr_path + " missing '" + key + "'");
}

}  // namespace

void write_pgm16(const std::string& path, const RealGrid& values, double scale_max,
                 const std::vector<std::string>& comments) {
  if (!(scale_max > 0.0)) scale_max = 1.0;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "P5\n";
  for (const std::string& c : comments) out << "# " << c << "\n";
  out << values.spec.n << " " << values.spec.n << "\n65535\n";
  std::vector<unsigned char> row(2 * values.spec.n);
  for (int i = 0; i < values.spec.n; ++i) {
    for (int j = 0; j < values.spec.n; ++j) {
      double s = values.at(i, j) / scale_max;
      s = std::clamp(s, 0.0, 1.0);
      const auto q = static_cast<std::uint16_t>(std::lround(s * 65535.0));
      row[2 * j] = static_cast<unsigned char>(q >> 8);
      row[2 * j + 1] = static_cast<unsigned char>(q & 0xff);
    }
    out.write(reinterpret_cast<const char*>(row.data()), row.size());
  }
  if (!out) throw IoError("short write to " + path);
}

Pgm16 read_pgm16(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5") throw IoError(path + ": not a binary PGM (P5)");
  skip_pgm_whitespace(in);
  Pgm16 img;
  in >> img.width;
  skip_pgm_whitespace(in);
  in >> img.height;
  skip_pgm_whitespace(in);
  int maxval = 0;
  in >> maxval;
  if (maxval != 65535) throw IoError(path + ": expected 16-bit PGM (maxval 65535)");
  in.get();  // single whitespace after maxval
  const std::size_t count = static_cast<std::size_t>(img.width) * img.height;
  std::vector<unsigned char> raw(2 * count);
  in.read(reinterpret_cast<char*>(raw.data()), raw.size());
  if (static_cast<std::size_t>(in.gcount()) != raw.size())
    throw IoError(path + ": truncated pixel data");
  img.samples.resize(count);
  for (std::size_t k = 0; k < count; ++k)
    img.samples[k] = static_cast<std::uint16_t>((raw[2 * k] << 8) | raw[2 * k + 1]);
  return img;
}

RealGrid read_amplitude_pgm(const std::string& path, double expected_pitch) {
  Pgm16 img = read_pgm16(path);
  if (img.width != img.height)
    throw IoError(path + ": mask PGM must be square");
  RealGrid t(GridSpec(img.width, expected_pitch));
  for (std::size_t k = 0; k < img.samples.size(); ++k)
    t.v[k] = img.samples[k] / 65535.0;
  return t;
}

void write_raw_grid(const std::string& path, const RealGrid& g) {
  static_assert(std::endian::native == std::endian::little,
                "raw grid serialization assumes a little-endian host");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(g.v.data()), g.v.size() * sizeof(double));
  std::ofstream hdr(path + ".hdr");
  if (!hdr) throw IoError("cannot write " + path + ".hdr");
  hdr << "n = " << g.spec.n << "\n";
  hdr.precision(17);
  hdr << "pitch = " << g.spec.pitch << "\n";
}

RealGrid read_raw_grid(const std::string& path) {
  static_assert(std::endian::native == std::endian::little,
                "raw grid serialization assumes a little-endian host");
  const int n = static_cast<int>(read_header_value(path + ".hdr", "n"));
  const double pitch = read_header_value(path + ".hdr", "pitch");
  RealGrid g(GridSpec(n, pitch));
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  in.read(reinterpret_cast<char*>(g.v.data()), g.v.size() * sizeof(double));
  if (static_cast<std::size_t>(in.gcount()) != g.v.size() * sizeof(double))
    throw IoError(path + ": truncated raw grid");
  return g;
}

}  // namespace ghostsim
