#include "sca/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "sca/errors.hpp"

namespace sca {

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

int parse_int(const std::string& tok, const std::filesystem::path& path) {
  try {
    return std::stoi(tok);
  } catch (const std::exception&) {
    throw IoError("malformed header in " + path.string());
  }
}

}  // namespace

GrayImage read_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string magic = next_token(in);
  if (magic != "P2" && magic != "P5" && magic != "P3" && magic != "P6")
    throw IoError("unsupported format in " + path.string() + " (expected P2/P3/P5/P6)");
  const int w = parse_int(next_token(in), path);
  const int h = parse_int(next_token(in), path);
  const int maxval = parse_int(next_token(in), path);
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) throw IoError("bad header in " + path.string());

  const bool binary = magic == "P5" || magic == "P6";
  const int channels = (magic == "P3" || magic == "P6") ? 3 : 1;
  const std::size_t n = std::size_t(w) * h * channels;
  std::vector<double> raw(n);
  if (binary) {
    const int bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> buf(n * bytes);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size())) throw IoError("truncated pixel data in " + path.string());
    for (std::size_t i = 0; i < n; ++i)
      raw[i] = bytes == 1 ? buf[i] : (buf[2 * i] << 8 | buf[2 * i + 1]);
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const std::string tok = next_token(in);
      if (tok.empty()) throw IoError("truncated pixel data in " + path.string());
      raw[i] = parse_int(tok, path);
    }
  }
  for (double& v : raw) v = std::min(v / maxval, 1.0);

  if (channels == 1) return GrayImage(w, h, std::move(raw));
  std::vector<double> r(std::size_t(w) * h), g(r.size()), b(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] = raw[3 * i];
    g[i] = raw[3 * i + 1];
    b[i] = raw[3 * i + 2];
  }
  return to_grayscale({GrayImage(w, h, std::move(r)), GrayImage(w, h, std::move(g)), GrayImage(w, h, std::move(b))});
}

namespace {

unsigned char to_byte(double v) { return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); }

}  // namespace

void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  std::vector<unsigned char> buf(img.size());
  auto px = img.pixels();
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = to_byte(px[i]);
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

void write_ppm(const std::filesystem::path& path, const RgbImage& img) {
  const int w = img.r.width();
  const int h = img.r.height();
  if (img.g.width() != w || img.b.width() != w || img.g.height() != h || img.b.height() != h)
    throw DimensionError("RGB channels differ in size");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P6\n" << w << ' ' << h << "\n255\n";
  std::vector<unsigned char> buf(img.r.size() * 3);
  auto r = img.r.pixels();
  auto g = img.g.pixels();
  auto b = img.b.pixels();
  for (std::size_t i = 0; i < r.size(); ++i) {
    buf[3 * i] = to_byte(r[i]);
    buf[3 * i + 1] = to_byte(g[i]);
    buf[3 * i + 2] = to_byte(b[i]);
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

GrayImage quantize_8bit(const GrayImage& img) {
  GrayImage out = img;
  for (double& v : out.pixels()) v = to_byte(v) / 255.0;
  return out;
}

}  // namespace sca
