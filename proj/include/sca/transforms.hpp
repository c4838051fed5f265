#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sca/geometry.hpp"
#include "sca/image.hpp"

namespace sca {

enum class Family { Scaling, Shearing, Rotation, RotationScale, NonuniformScale, JpegCompression, GaussianNoise };

/// All seven families in canonical order.
const std::vector<Family>& all_families();
std::string to_string(Family family);
/// Accepts the canonical name case-insensitively plus the short aliases
/// "jpeg" and "noise". Throws ParameterError.
Family family_from_string(const std::string& name);

struct TransformSpec {
  Family family = Family::Scaling;
  double sx = 1.0;
  double sy = 1.0;
  double shx = 0.0;
  double shy = 0.0;
  double theta_deg = 0.0;
  int quality = 100;
  double variance = 0.0;
  std::uint64_t seed = 0;

  bool geometric() const;
  /// Compact parameter text, stable across runs (used for seeds and file names).
  std::string label() const;
  /// The parameter that varies along the family's plot axis.
  double plot_x() const;
};

/// Grid of every spec in a family; seeds are left at 0.
std::vector<TransformSpec> enumerate_specs(Family family);

/// Per-family totals published for the original 23-image benchmark. They are
/// kept as metadata; three of them disagree with the enumerated grids.
int published_count(Family family);

/// x' = a*x + b*y + tx, y' = c*x + d*y + ty.
struct Affine {
  double a = 1, b = 0, c = 0, d = 1, tx = 0, ty = 0;

  Point2 apply(Point2 p) const { return {a * p.x + b * p.y + tx, c * p.x + d * p.y + ty}; }
  /// Throws DegenerateGeometryError for a singular matrix.
  Affine inverse() const;
};

/// Output canvas and forward pixel map of a geometric spec on a w x h input.
struct WarpGeometry {
  Affine forward;
  int width = 0;
  int height = 0;
};

/// Linear part S * R * Sh with S = diag(sx, sy), R the rotation by theta in
/// pixel coordinates and Sh = [[1, shx], [shy, 1]].
Affine linear_part(const TransformSpec& spec);

/// The canvas is the bounding box of the transformed pixel area
/// [-0.5, w - 0.5] x [-0.5, h - 0.5]; the input center maps to the output center.
WarpGeometry warp_geometry(const TransformSpec& spec, int width, int height);

/// Inverse-mapped bilinear warp. Output pixels whose preimage leaves the
/// input pixel area are 0; inside it, sampling replicates edge pixels.
GrayImage warp_affine(const GrayImage& img, const Affine& forward, int out_width, int out_height);

/// Throws ParameterError for a non-geometric spec.
GrayImage apply_geometric(const GrayImage& img, const TransformSpec& spec);

/// Forward image of `p` in the output frame of a w x h input; identity for
/// photometric families.
Point2 map_point(const TransformSpec& spec, int width, int height, Point2 p);

/// Block-DCT quantization round trip with the standard luminance table.
/// Throws ParameterError unless 1 <= quality <= 100.
GrayImage jpeg_degrade(const GrayImage& img, int quality);

/// Scaled luminance quantization table for `quality`, row-major 8x8.
std::vector<int> jpeg_quant_table(int quality);

/// Adds i.i.d. N(0, variance) noise and clamps. Throws ParameterError when
/// variance <= 0.
GrayImage add_gaussian_noise(const GrayImage& img, double variance, std::uint64_t seed);

/// FNV-1a hash of (base seed, image id, spec label); independent of any
/// processing order.
std::uint64_t derive_seed(std::uint64_t base_seed, const std::string& image_id, const TransformSpec& spec);

/// Dispatches on the family; noise uses spec.seed.
GrayImage apply_transform(const GrayImage& img, const TransformSpec& spec);

struct ManifestRow {
  std::string image_id;
  std::filesystem::path base_path;
  TransformSpec spec;
  std::filesystem::path output_path;
};

void write_manifest(std::ostream& os, const std::vector<ManifestRow>& rows);
/// Relative paths are resolved against `base_dir`. Throws IoError.
std::vector<ManifestRow> read_manifest(std::istream& is, const std::filesystem::path& base_dir = {});

}  // namespace sca
