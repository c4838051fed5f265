#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sca/geometry.hpp"
#include "sca/image.hpp"

namespace sca {

enum class ShapeKind { Polygon, Star, RoundedRect, BlobNoCorners };

std::string to_string(ShapeKind kind);

struct Canvas {
  int width = 200;
  int height = 200;
  double background = 0.1;
  double fill = 0.9;
};

struct SynthFixture {
  std::string id;
  ShapeKind kind = ShapeKind::Polygon;
  GrayImage image;
  std::vector<Point2> true_corners;
  /// Unsigned angle (degrees) between the two boundary edges meeting at
  /// each true corner.
  std::vector<double> corner_angles;
  /// Boundary outline the raster was built from (vertices, or a dense
  /// sampling for curved shapes).
  Polyline outline;
};

/// Filled regular n-gon centered on the canvas. Throws ParameterError when
/// the shape leaves the canvas or its perimeter cannot hold a full chord
/// placement of the largest default chord.
SynthFixture make_polygon(int n_vertices, double radius, double rotation_deg, const Canvas& canvas = {});

/// Star with `n_points` tips at r_outer and folds at r_inner.
SynthFixture make_star(int n_points, double r_outer, double r_inner, double rotation_deg = 0.0,
                       const Canvas& canvas = {});

/// Rectangle with circular corner arcs; the arc midpoints are its corners.
SynthFixture make_rounded_rect(double half_w, double half_h, double corner_radius, double rotation_deg,
                               const Canvas& canvas = {});

/// Smooth closed blob r(phi) = radius * (1 + sum_k a_k cos(k phi + p_k)),
/// k = 2..3, with amplitudes drawn from [0, 1/smoothness) by a seeded
/// generator. smoothness <= 0 means a circle. `aspect` stretches along x.
SynthFixture make_blob(double radius, double smoothness, std::uint64_t seed, double aspect = 1.0,
                       const Canvas& canvas = {});

/// The 23-fixture benchmark corpus: polygons, stars, rounded rectangles and
/// corner-free blobs, deterministic under `seed`.
std::vector<SynthFixture> make_corpus(std::uint64_t seed = 7);

/// Anti-aliased coverage raster of a closed polygon (even-odd rule),
/// 4x4 supersampling per pixel.
GrayImage rasterize_polygon(const Polyline& outline, const Canvas& canvas);

}  // namespace sca
