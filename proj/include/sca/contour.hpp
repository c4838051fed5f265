#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sca/geometry.hpp"
#include "sca/image.hpp"

namespace sca {

/// Ordered chain of edge points. Before smoothing, consecutive points are
/// 8-neighbors; a closed curve's last point is an 8-neighbor of its first.
struct Curve {
  Polyline points;
  bool closed = false;

  std::size_t size() const { return points.size(); }
};

/// Edge pixel where three or more branches meet.
struct TJunction {
  Point2 position;
  int degree = 0;
};

/// Number of 0->1 transitions around the 8-neighborhood of (x, y), i.e. the
/// count of edge branches once adjacent ring neighbors are merged into arcs.
int branch_count(const EdgeMap& edges, int x, int y);

/// Every edge pixel with at least three branches.
std::vector<TJunction> detect_t_junctions(const EdgeMap& edges);

/// Bridges single-pixel gaps: when two chain endpoints sit two pixels apart
/// (Chebyshev) with an empty pixel between them, that pixel is switched on.
EdgeMap bridge_gaps(const EdgeMap& edges);

/// Removes, in raster order until stable, every pixel whose three or more
/// foreground neighbours form a single 8-connected group. Clears pixel
/// blocks while keeping line ends, elbows and connectivity.
EdgeMap thin_edges(const EdgeMap& edges);

/// Deletes branches of at most `max_length` pixels that run from a free end
/// into a junction. Such spurs appear where Canny meets a sharp tip.
EdgeMap prune_spurs(const EdgeMap& edges, int max_length);

struct CurveExtraction {
  std::vector<Curve> curves;
  std::vector<TJunction> junctions;
  /// Pixels of chains dropped for being shorter than the minimum length.
  std::vector<Point2> discarded;
};

/// Extends each free chain end along its own direction by up to `max_gap`
/// pixels when that reaches an edge pixel of another branch. Closes the
/// short gaps Canny leaves where a weaker edge meets a stronger one.
EdgeMap extend_endpoints(const EdgeMap& edges, int max_gap);

/// Traces 8-connected chains from endpoints and junction neighbors, then
/// closes the remaining loops. Junction pixels end chains and are copied
/// into every incident curve as its endpoint. Before tracing the map goes
/// through thin_edges, bridge_gaps, extend_endpoints(3) and
/// prune_spurs(max_spur_length).
CurveExtraction extract_curves_with_junctions(const EdgeMap& edges, std::size_t min_curve_length,
                                              int max_spur_length = 3);

std::vector<Curve> extract_curves(const EdgeMap& edges, std::size_t min_curve_length);

struct SmoothResult {
  Curve curve;
  bool unchanged_too_short = false;
};

/// Gaussian smoothing of the coordinate sequences: endpoint replication for
/// open curves, circular convolution for closed ones. A curve shorter than
/// the kernel is returned untouched with the flag set.
SmoothResult smooth_curve_checked(const Curve& curve, double sigma);

Curve smooth_curve(const Curve& curve, double sigma);

struct ResampledCurve {
  Curve curve;
  /// For every resampled point, the source index nearest in arc length.
  std::vector<std::size_t> source_index;
};

/// Re-spaces a curve to constant arc-length `step` along its polyline.
/// Closed curves include the closing segment.
ResampledCurve resample_curve(const Curve& curve, double step);

/// Plain-text dump, one "curve_id x y" line per point.
std::string dump_curves(const std::vector<Curve>& curves);

}  // namespace sca
