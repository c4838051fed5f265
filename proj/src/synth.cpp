#include "sca/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "sca/curvature.hpp"
#include "sca/errors.hpp"

namespace sca {

namespace {

constexpr int kSuper = 4;
constexpr double kMargin = 4.0;
// perimeter needed for one full placement of the largest default chord
constexpr double kMinPerimeter = 2 * 30 + 2;

double deg2rad(double d) { return d * M_PI / 180.0; }

Point2 canvas_center(const Canvas& c) { return {(c.width - 1) / 2.0, (c.height - 1) / 2.0}; }

void check_fits(const Polyline& outline, const Canvas& canvas) {
  double perimeter = 0.0;
  for (std::size_t i = 0; i < outline.size(); ++i) {
    const Point2 p = outline[i];
    if (p.x < kMargin || p.y < kMargin || p.x > canvas.width - 1 - kMargin || p.y > canvas.height - 1 - kMargin)
      throw ParameterError("shape does not fit in the canvas");
    perimeter += distance(p, outline[(i + 1) % outline.size()]);
  }
  if (perimeter < kMinPerimeter) throw ParameterError("shape too small for chord support");
}

std::vector<double> vertex_angles(const Polyline& outline) {
  std::vector<double> out;
  const std::size_t n = outline.size();
  for (std::size_t i = 0; i < n; ++i) out.push_back(interior_angle(outline[(i + n - 1) % n], outline[i], outline[(i + 1) % n]));
  return out;
}

}  // namespace

std::string to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::Polygon: return "polygon";
    case ShapeKind::Star: return "star";
    case ShapeKind::RoundedRect: return "rounded_rect";
    case ShapeKind::BlobNoCorners: return "blob_no_corners";
  }
  return "unknown";
}

GrayImage rasterize_polygon(const Polyline& outline, const Canvas& canvas) {
  const int w = canvas.width;
  const int h = canvas.height;
  std::vector<int> hits(std::size_t(w) * h, 0);
  std::vector<double> xs;
  for (int sy = 0; sy < h * kSuper; ++sy) {
    const double y = (sy + 0.5) / kSuper - 0.5;
    xs.clear();
    for (std::size_t i = 0; i < outline.size(); ++i) {
      const Point2 a = outline[i];
      const Point2 b = outline[(i + 1) % outline.size()];
      if ((a.y <= y) == (b.y <= y)) continue;
      xs.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
    }
    std::sort(xs.begin(), xs.end());
    const int py = sy / kSuper;
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
      // sample columns sx with x = (sx + 0.5)/S - 0.5 inside [xs[i], xs[i+1])
      const int s0 = std::max(0, static_cast<int>(std::ceil((xs[i] + 0.5) * kSuper - 0.5)));
      const int s1 = std::min(w * kSuper - 1, static_cast<int>(std::ceil((xs[i + 1] + 0.5) * kSuper - 0.5)) - 1);
      for (int sx = s0; sx <= s1; ++sx) ++hits[std::size_t(py) * w + sx / kSuper];
    }
  }
  std::vector<double> px(hits.size());
  const double full = kSuper * kSuper;
  for (std::size_t i = 0; i < px.size(); ++i) {
    const double cover = hits[i] / full;
    px[i] = canvas.background + (canvas.fill - canvas.background) * cover;
  }
  return GrayImage(w, h, std::move(px));
}

SynthFixture make_polygon(int n_vertices, double radius, double rotation_deg, const Canvas& canvas) {
  if (n_vertices < 3) throw ParameterError("polygon needs at least 3 vertices");
  if (!(radius > 0.0)) throw ParameterError("polygon radius must be positive");
  const Point2 c = canvas_center(canvas);
  SynthFixture f;
  f.kind = ShapeKind::Polygon;
  f.id = "polygon" + std::to_string(n_vertices);
  for (int i = 0; i < n_vertices; ++i) {
    const double t = deg2rad(rotation_deg) + 2.0 * M_PI * i / n_vertices - M_PI / 2;
    f.outline.push_back({c.x + radius * std::cos(t), c.y + radius * std::sin(t)});
  }
  check_fits(f.outline, canvas);
  f.true_corners = f.outline;
  f.corner_angles = vertex_angles(f.outline);
  f.image = rasterize_polygon(f.outline, canvas);
  return f;
}

SynthFixture make_star(int n_points, double r_outer, double r_inner, double rotation_deg, const Canvas& canvas) {
  if (n_points < 2) throw ParameterError("star needs at least 2 points");
  if (!(r_outer > r_inner && r_inner > 0.0)) throw ParameterError("star radii must satisfy r_outer > r_inner > 0");
  const Point2 c = canvas_center(canvas);
  SynthFixture f;
  f.kind = ShapeKind::Star;
  f.id = "star" + std::to_string(n_points);
  for (int i = 0; i < 2 * n_points; ++i) {
    const double r = i % 2 == 0 ? r_outer : r_inner;
    const double t = deg2rad(rotation_deg) + M_PI * i / n_points - M_PI / 2;
    f.outline.push_back({c.x + r * std::cos(t), c.y + r * std::sin(t)});
  }
  check_fits(f.outline, canvas);
  f.true_corners = f.outline;
  f.corner_angles = vertex_angles(f.outline);
  f.image = rasterize_polygon(f.outline, canvas);
  return f;
}

SynthFixture make_rounded_rect(double half_w, double half_h, double corner_radius, double rotation_deg,
                               const Canvas& canvas) {
  if (!(half_w > 0 && half_h > 0)) throw ParameterError("rectangle half sizes must be positive");
  if (!(corner_radius >= 0 && corner_radius < std::min(half_w, half_h)))
    throw ParameterError("corner radius must be below the half sizes");
  const Point2 c = canvas_center(canvas);
  const double rot = deg2rad(rotation_deg);
  auto place = [&](Point2 p) {
    return Point2{c.x + p.x * std::cos(rot) - p.y * std::sin(rot), c.y + p.x * std::sin(rot) + p.y * std::cos(rot)};
  };
  SynthFixture f;
  f.kind = ShapeKind::RoundedRect;
  f.id = "rounded_rect";
  const Point2 centers[4] = {{half_w - corner_radius, -half_h + corner_radius},
                             {half_w - corner_radius, half_h - corner_radius},
                             {-half_w + corner_radius, half_h - corner_radius},
                             {-half_w + corner_radius, -half_h + corner_radius}};
  const double start[4] = {-M_PI / 2, 0.0, M_PI / 2, M_PI};
  constexpr int kArcSteps = 16;
  for (int q = 0; q < 4; ++q) {
    for (int s = 0; s <= kArcSteps; ++s) {
      const double t = start[q] + (M_PI / 2) * s / kArcSteps;
      f.outline.push_back(place({centers[q].x + corner_radius * std::cos(t), centers[q].y + corner_radius * std::sin(t)}));
    }
    const double mid = start[q] + M_PI / 4;
    f.true_corners.push_back(
        place({centers[q].x + corner_radius * std::cos(mid), centers[q].y + corner_radius * std::sin(mid)}));
    f.corner_angles.push_back(90.0);
  }
  check_fits(f.outline, canvas);
  f.image = rasterize_polygon(f.outline, canvas);
  return f;
}

SynthFixture make_blob(double radius, double smoothness, std::uint64_t seed, double aspect, const Canvas& canvas) {
  if (!(radius > 0.0 && aspect > 0.0)) throw ParameterError("blob radius and aspect must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double amp[2] = {0.0, 0.0};
  double phase[2] = {0.0, 0.0};
  if (smoothness > 0.0)
    for (int k = 0; k < 2; ++k) {
      amp[k] = unit(rng) / smoothness;
      phase[k] = 2.0 * M_PI * unit(rng);
    }
  const Point2 c = canvas_center(canvas);
  SynthFixture f;
  f.kind = ShapeKind::BlobNoCorners;
  f.id = "blob";
  constexpr int kSamples = 720;
  for (int i = 0; i < kSamples; ++i) {
    const double t = 2.0 * M_PI * i / kSamples;
    const double r = radius * (1.0 + amp[0] * std::cos(2 * t + phase[0]) + amp[1] * std::cos(3 * t + phase[1]));
    f.outline.push_back({c.x + aspect * r * std::cos(t), c.y + r * std::sin(t)});
  }
  check_fits(f.outline, canvas);
  f.image = rasterize_polygon(f.outline, canvas);
  return f;
}

std::vector<SynthFixture> make_corpus(std::uint64_t seed) {
  std::vector<SynthFixture> out;
  auto add = [&](SynthFixture f, const std::string& id) {
    f.id = id;
    out.push_back(std::move(f));
  };
  add(make_polygon(3, 75, 0), "tri_0");
  add(make_polygon(3, 75, 17), "tri_17");
  add(make_polygon(4, 70, 0), "square_0");
  add(make_polygon(4, 70, 20), "square_20");
  add(make_polygon(4, 70, 45), "square_45");
  add(make_polygon(5, 72, 0), "pentagon_0");
  add(make_polygon(6, 75, 10), "hexagon_10");
  add(make_polygon(7, 78, 5), "heptagon_5");
  add(make_polygon(8, 80, 0), "octagon_0");
  add(make_polygon(10, 85, 3), "decagon_3");
  add(make_polygon(12, 88, 0), "dodecagon_0");
  add(make_star(4, 80, 35, 10), "star4");
  add(make_star(5, 82, 38, 0), "star5");
  add(make_star(6, 82, 45, 7), "star6");
  add(make_rounded_rect(70, 45, 5, 0), "rrect_0");
  add(make_rounded_rect(60, 60, 8, 30), "rrect_30");
  add(make_rounded_rect(75, 40, 6, -15), "rrect_m15");
  add(make_blob(60, 0.0, seed), "circle");
  add(make_blob(40, 0.0, seed, 2.0), "ellipse_2to1");
  add(make_blob(60, 8.0, seed + 1), "blob_a");
  add(make_blob(55, 8.0, seed + 2), "blob_b");
  add(make_blob(65, 10.0, seed + 3, 1.2), "blob_c");
  add(make_blob(50, 12.0, seed + 4, 0.8), "blob_d");
  return out;
}

}  // namespace sca
