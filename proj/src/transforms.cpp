#include "sca/transforms.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "sca/errors.hpp"

namespace sca {

namespace {

std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw IoError("bad number in manifest: " + s);
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw IoError("bad integer in manifest: " + s);
  return v;
}

// Exact values at multiples of 90 degrees so quarter turns permute pixels.
std::pair<double, double> cos_sin_deg(double deg) {
  const double r = std::fmod(deg, 360.0);
  const double q = r / 90.0;
  if (q == std::round(q)) {
    switch ((static_cast<int>(std::round(q)) % 4 + 4) % 4) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  const double rad = deg * std::numbers::pi / 180.0;
  return {std::cos(rad), std::sin(rad)};
}

constexpr std::array<int, 64> kLuminance = {
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};

// basis[u][x] = c(u) * cos((2x + 1) u pi / 16), orthonormal.
const std::array<std::array<double, 8>, 8>& dct_basis() {
  static const auto basis = [] {
    std::array<std::array<double, 8>, 8> b{};
    for (int u = 0; u < 8; ++u)
      for (int x = 0; x < 8; ++x)
        b[u][x] = (u == 0 ? std::sqrt(0.125) : 0.5) * std::cos((2 * x + 1) * u * std::numbers::pi / 16.0);
    return b;
  }();
  return basis;
}

}  // namespace

const std::vector<Family>& all_families() {
  static const std::vector<Family> f = {Family::Scaling,         Family::Shearing,        Family::Rotation,
                                        Family::RotationScale,   Family::NonuniformScale, Family::JpegCompression,
                                        Family::GaussianNoise};
  return f;
}

std::string to_string(Family family) {
  switch (family) {
    case Family::Scaling: return "Scaling";
    case Family::Shearing: return "Shearing";
    case Family::Rotation: return "Rotation";
    case Family::RotationScale: return "RotationScale";
    case Family::NonuniformScale: return "NonuniformScale";
    case Family::JpegCompression: return "JpegCompression";
    case Family::GaussianNoise: return "GaussianNoise";
  }
  return "?";
}

Family family_from_string(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
  for (Family f : all_families()) {
    std::string canon = to_string(f);
    std::transform(canon.begin(), canon.end(), canon.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (lower == canon) return f;
  }
  if (lower == "jpeg") return Family::JpegCompression;
  if (lower == "noise") return Family::GaussianNoise;
  throw ParameterError("unknown transform family: " + name);
}

bool TransformSpec::geometric() const {
  return family != Family::JpegCompression && family != Family::GaussianNoise;
}

std::string TransformSpec::label() const {
  switch (family) {
    case Family::Scaling: return "s" + num(sx);
    case Family::Shearing: return "shx" + num(shx) + "_shy" + num(shy);
    case Family::Rotation: return "r" + num(theta_deg);
    case Family::RotationScale: return "r" + num(theta_deg) + "_sx" + num(sx) + "_sy" + num(sy);
    case Family::NonuniformScale: return "sx" + num(sx) + "_sy" + num(sy);
    case Family::JpegCompression: return "q" + std::to_string(quality);
    case Family::GaussianNoise: return "v" + num(variance);
  }
  return {};
}

double TransformSpec::plot_x() const {
  switch (family) {
    case Family::Scaling:
    case Family::NonuniformScale: return sx;
    case Family::Shearing: return shx;
    case Family::Rotation:
    case Family::RotationScale: return theta_deg;
    case Family::JpegCompression: return quality;
    case Family::GaussianNoise: return variance;
  }
  return 0.0;
}

std::vector<TransformSpec> enumerate_specs(Family family) {
  std::vector<TransformSpec> out;
  TransformSpec base;
  base.family = family;
  switch (family) {
    case Family::Scaling:
      for (int i = 5; i <= 20; ++i) {
        if (i == 10) continue;
        TransformSpec s = base;
        s.sx = s.sy = i / 10.0;
        out.push_back(s);
      }
      break;
    case Family::Shearing:
      for (int i = 0; i <= 6; ++i)
        for (int j = 0; j <= 6; ++j) {
          if (i == 0 && j == 0) continue;
          TransformSpec s = base;
          s.shx = i * 2 / 1000.0;
          s.shy = j * 2 / 1000.0;
          out.push_back(s);
        }
      break;
    case Family::Rotation:
      for (int t = -90; t <= 90; t += 10) {
        if (t == 0) continue;
        TransformSpec s = base;
        s.theta_deg = t;
        out.push_back(s);
      }
      break;
    case Family::RotationScale:
      for (int t = -30; t <= 30; t += 10)
        for (int i = 8; i <= 12; ++i)
          for (int j = 8; j <= 12; ++j) {
            TransformSpec s = base;
            s.theta_deg = t;
            s.sx = i / 10.0;
            s.sy = j / 10.0;
            out.push_back(s);
          }
      break;
    case Family::NonuniformScale:
      for (int i = 7; i <= 13; ++i)
        for (int j = 5; j <= 15; ++j) {
          TransformSpec s = base;
          s.sx = i / 10.0;
          s.sy = j / 10.0;
          out.push_back(s);
        }
      break;
    case Family::JpegCompression:
      for (int q = 5; q <= 100; q += 5) {
        TransformSpec s = base;
        s.quality = q;
        out.push_back(s);
      }
      break;
    case Family::GaussianNoise:
      for (int i = 1; i <= 10; ++i) {
        TransformSpec s = base;
        s.variance = i * 5 / 1000.0;
        out.push_back(s);
      }
      break;
  }
  return out;
}

int published_count(Family family) {
  switch (family) {
    case Family::Scaling: return 345;
    case Family::Shearing: return 1081;
    case Family::Rotation: return 437;
    case Family::RotationScale: return 4025;
    case Family::NonuniformScale: return 1772;
    case Family::JpegCompression: return 460;
    case Family::GaussianNoise: return 230;
  }
  return 0;
}

Affine Affine::inverse() const {
  const double det = a * d - b * c;
  if (std::abs(det) < 1e-15) throw DegenerateGeometryError("singular affine matrix");
  Affine inv;
  inv.a = d / det;
  inv.b = -b / det;
  inv.c = -c / det;
  inv.d = a / det;
  inv.tx = -(inv.a * tx + inv.b * ty);
  inv.ty = -(inv.c * tx + inv.d * ty);
  return inv;
}

Affine linear_part(const TransformSpec& spec) {
  const auto [cs, sn] = cos_sin_deg(spec.theta_deg);
  // R * Sh
  const double r00 = cs + -sn * spec.shy;
  const double r01 = cs * spec.shx - sn;
  const double r10 = sn + cs * spec.shy;
  const double r11 = sn * spec.shx + cs;
  Affine m;
  m.a = spec.sx * r00;
  m.b = spec.sx * r01;
  m.c = spec.sy * r10;
  m.d = spec.sy * r11;
  return m;
}

WarpGeometry warp_geometry(const TransformSpec& spec, int width, int height) {
  if (width <= 0 || height <= 0) throw DimensionError("warp of an empty image");
  Affine m = spec.geometric() ? linear_part(spec) : Affine{};
  const double hw = width / 2.0, hh = height / 2.0;
  const double ext_x = std::abs(m.a) * hw + std::abs(m.b) * hh;
  const double ext_y = std::abs(m.c) * hw + std::abs(m.d) * hh;
  WarpGeometry g;
  g.width = std::max(1, static_cast<int>(std::ceil(2.0 * ext_x - 1e-6)));
  g.height = std::max(1, static_cast<int>(std::ceil(2.0 * ext_y - 1e-6)));
  const Point2 c_in{(width - 1) / 2.0, (height - 1) / 2.0};
  const Point2 c_out{(g.width - 1) / 2.0, (g.height - 1) / 2.0};
  m.tx = c_out.x - (m.a * c_in.x + m.b * c_in.y);
  m.ty = c_out.y - (m.c * c_in.x + m.d * c_in.y);
  g.forward = m;
  return g;
}

GrayImage warp_affine(const GrayImage& img, const Affine& forward, int out_width, int out_height) {
  if (img.empty()) throw DimensionError("warp of an empty image");
  if (out_width <= 0 || out_height <= 0) throw DimensionError("warp to an empty canvas");
  const Affine inv = forward.inverse();
  const int w = img.width(), h = img.height();
  GrayImage out(out_width, out_height, 0.0);
  for (int y = 0; y < out_height; ++y)
    for (int x = 0; x < out_width; ++x) {
      const Point2 q = inv.apply({double(x), double(y)});
      if (q.x < -0.5 || q.y < -0.5 || q.x > w - 0.5 || q.y > h - 0.5) continue;
      const double fx0 = std::floor(q.x), fy0 = std::floor(q.y);
      const double fx = q.x - fx0, fy = q.y - fy0;
      const int x0 = static_cast<int>(fx0), y0 = static_cast<int>(fy0);
      double v = (1 - fx) * (1 - fy) * img.clamped(x0, y0);
      if (fx > 0) v += fx * (1 - fy) * img.clamped(x0 + 1, y0);
      if (fy > 0) v += (1 - fx) * fy * img.clamped(x0, y0 + 1);
      if (fx > 0 && fy > 0) v += fx * fy * img.clamped(x0 + 1, y0 + 1);
      out.at(x, y) = std::clamp(v, 0.0, 1.0);
    }
  return out;
}

GrayImage apply_geometric(const GrayImage& img, const TransformSpec& spec) {
  if (!spec.geometric()) throw ParameterError("apply_geometric needs a geometric spec, got " + to_string(spec.family));
  const WarpGeometry g = warp_geometry(spec, img.width(), img.height());
  return warp_affine(img, g.forward, g.width, g.height);
}

Point2 map_point(const TransformSpec& spec, int width, int height, Point2 p) {
  if (!spec.geometric()) return p;
  return warp_geometry(spec, width, height).forward.apply(p);
}

std::vector<int> jpeg_quant_table(int quality) {
  if (quality < 1 || quality > 100) throw ParameterError("JPEG quality must lie in [1, 100]");
  const int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
  std::vector<int> t(64);
  for (int i = 0; i < 64; ++i) t[i] = std::clamp((kLuminance[i] * scale + 50) / 100, 1, 255);
  return t;
}

GrayImage jpeg_degrade(const GrayImage& img, int quality) {
  const std::vector<int> table = jpeg_quant_table(quality);
  const auto& basis = dct_basis();
  const int w = img.width(), h = img.height();
  GrayImage out(w, h, 0.0);
  double block[8][8], tmp[8][8], coef[8][8];
  for (int by = 0; by < h; by += 8)
    for (int bx = 0; bx < w; bx += 8) {
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) block[y][x] = img.clamped(bx + x, by + y) * 255.0 - 128.0;
      // rows then columns
      for (int y = 0; y < 8; ++y)
        for (int u = 0; u < 8; ++u) {
          double s = 0;
          for (int x = 0; x < 8; ++x) s += basis[u][x] * block[y][x];
          tmp[y][u] = s;
        }
      for (int v = 0; v < 8; ++v)
        for (int u = 0; u < 8; ++u) {
          double s = 0;
          for (int y = 0; y < 8; ++y) s += basis[v][y] * tmp[y][u];
          const double q = table[v * 8 + u];
          coef[v][u] = std::round(s / q) * q;
        }
      for (int y = 0; y < 8; ++y)
        for (int u = 0; u < 8; ++u) {
          double s = 0;
          for (int v = 0; v < 8; ++v) s += basis[v][y] * coef[v][u];
          tmp[y][u] = s;
        }
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
          if (bx + x >= w || by + y >= h) continue;
          double s = 0;
          for (int u = 0; u < 8; ++u) s += basis[u][x] * tmp[y][u];
          out.at(bx + x, by + y) = std::clamp((s + 128.0) / 255.0, 0.0, 1.0);
        }
    }
  return out;
}

GrayImage add_gaussian_noise(const GrayImage& img, double variance, std::uint64_t seed) {
  if (!(variance > 0)) throw ParameterError("noise variance must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, std::sqrt(variance));
  GrayImage out = img;
  for (double& v : out.pixels()) v = std::clamp(v + noise(rng), 0.0, 1.0);
  return out;
}

std::uint64_t derive_seed(std::uint64_t base_seed, const std::string& image_id, const TransformSpec& spec) {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](unsigned char byte) {
    h ^= byte;
    h *= 1099511628211ull;
  };
  for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>(base_seed >> (8 * i)));
  for (char ch : image_id + '|' + to_string(spec.family) + '|' + spec.label()) mix(static_cast<unsigned char>(ch));
  return h;
}

GrayImage apply_transform(const GrayImage& img, const TransformSpec& spec) {
  switch (spec.family) {
    case Family::JpegCompression: return jpeg_degrade(img, spec.quality);
    case Family::GaussianNoise: return add_gaussian_noise(img, spec.variance, spec.seed);
    default: return apply_geometric(img, spec);
  }
}

namespace {
constexpr const char* kManifestHeader =
    "image_id,base_path,family,sx,sy,shx,shy,theta_deg,quality,variance,seed,output_path";
}

void write_manifest(std::ostream& os, const std::vector<ManifestRow>& rows) {
  os << kManifestHeader << '\n';
  for (const ManifestRow& r : rows) {
    const TransformSpec& s = r.spec;
    os << r.image_id << ',' << r.base_path.generic_string() << ',' << to_string(s.family) << ',' << num(s.sx) << ','
       << num(s.sy) << ',' << num(s.shx) << ',' << num(s.shy) << ',' << num(s.theta_deg) << ',' << s.quality << ','
       << num(s.variance) << ',' << s.seed << ',' << r.output_path.generic_string() << '\n';
  }
}

std::vector<ManifestRow> read_manifest(std::istream& is, const std::filesystem::path& base_dir) {
  std::vector<ManifestRow> rows;
  std::string line;
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  };
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.rfind("image_id,", 0) == 0) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 12) throw IoError("manifest row has " + std::to_string(f.size()) + " fields: " + line);
    ManifestRow r;
    r.image_id = f[0];
    r.base_path = resolve(f[1]);
    try {
      r.spec.family = family_from_string(f[2]);
    } catch (const ParameterError& e) {
      throw IoError(e.what());
    }
    r.spec.sx = parse_double(f[3]);
    r.spec.sy = parse_double(f[4]);
    r.spec.shx = parse_double(f[5]);
    r.spec.shy = parse_double(f[6]);
    r.spec.theta_deg = parse_double(f[7]);
    r.spec.quality = static_cast<int>(parse_u64(f[8]));
    r.spec.variance = parse_double(f[9]);
    r.spec.seed = parse_u64(f[10]);
    r.output_path = f[11].empty() ? std::filesystem::path{} : resolve(f[11]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace sca
