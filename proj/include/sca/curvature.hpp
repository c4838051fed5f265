#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sca/contour.hpp"
#include "sca/geometry.hpp"
#include "sca/image.hpp"

namespace sca {

enum class DetectorMode { Cpda, Sca };

/// How the angle at a candidate is measured during false-corner removal.
///  - Chord: angle between the straight segments to the two neighbors.
///  - Tangent: angle between the tangents of the two curve arcs that join
///    the candidate to its neighbors. Equals Chord when the arcs are straight.
enum class AngleMode { Chord, Tangent };

/// Iterative removes the weakest offending candidate first and re-evaluates
/// neighbors; SinglePass judges every candidate against the initial set.
enum class AngleRefinement { Iterative, SinglePass };

struct DetectorParams {
  DetectorMode mode = DetectorMode::Sca;
  std::vector<int> chord_lengths{15};
  double curvature_threshold = 0.067;
  double angle_threshold_deg = 157.0;

  CannyParams canny{};
  double curve_sigma = 3.0;
  /// Arc-length spacing the smoothed curve is resampled to before
  /// accumulation; 0 keeps the raw pixel-chain indexing.
  double resample_step = 1.0;
  /// 0 selects 2 * max(chord_lengths) + 2.
  std::size_t min_curve_length = 0;
  AngleMode angle_mode = AngleMode::Tangent;
  AngleRefinement angle_refinement = AngleRefinement::Iterative;
  double junction_merge_radius = 3.0;

  static DetectorParams cpda();
  static DetectorParams sca();

  int max_chord() const;
  std::size_t effective_min_curve_length() const;
  std::string name() const;
  /// Throws ParameterError when an invariant does not hold.
  void validate() const;
};

/// Cost counters. One sqrt is charged per chord norm actually evaluated and
/// one distance per chord-to-point distance.
struct OpCounters {
  std::uint64_t sqrt_evals = 0;
  std::uint64_t distance_evals = 0;

  OpCounters& operator+=(const OpCounters& o) {
    sqrt_evals += o.sqrt_evals;
    distance_evals += o.distance_evals;
    return *this;
  }
  friend bool operator==(const OpCounters&, const OpCounters&) = default;
};

struct CurvatureProfile {
  int curve_id = 0;
  int chord_length = 0;
  bool closed = false;
  std::vector<double> h;
  std::vector<double> h_norm;
  std::vector<double> combined;
  std::vector<unsigned char> valid;
  /// Set by normalize() when max(h) over the valid points is at most 1e-9
  /// pixels, i.e. zero up to rounding.
  bool cornerless = false;

  std::size_t size() const { return h.size(); }
};

/// Perpendicular distance from `p` to the line through `a` and `b`.
/// Throws DegenerateGeometryError when a == b.
double chord_point_distance(Point2 p, Point2 a, Point2 b, OpCounters* counters = nullptr);

enum class PlacementBounds {
  /// j = k-L+1 .. k-1: only placements that keep P_k strictly interior.
  Interior,
  /// j = k-L .. k: additionally the two placements with P_k as an endpoint.
  Inclusive,
};

/// Chord-to-point distance accumulation with chord length `chord`:
/// h(k) = sum over chord placements (P_j, P_{j+L}) that contain P_k of the
/// distance from P_k to the chord line. Open curves only get values where
/// the full sliding range fits; other points are marked invalid.
CurvatureProfile accumulate(const Curve& curve, int chord, OpCounters* counters = nullptr, int curve_id = 0,
                            PlacementBounds bounds = PlacementBounds::Interior);

/// h_norm = h / max(h) over valid points (all zero for a flat profile).
/// Also copies h_norm into combined.
void normalize(CurvatureProfile& profile);

/// Point-wise product of the normalized profiles; valid where all are.
/// Throws InputError when curve ids or lengths disagree.
CurvatureProfile combine_cpda(std::span<const CurvatureProfile> profiles);

/// Strict local maxima of `combined` among valid neighbors. A plateau counts
/// once, at its first index. Closed curves wrap.
std::vector<std::size_t> local_maxima(const CurvatureProfile& profile);

/// Drops candidates whose combined value is strictly below `threshold`.
std::vector<std::size_t> refine_curvature(const std::vector<std::size_t>& candidates,
                                          const CurvatureProfile& profile, double threshold);

/// Interior angle (degrees) at P_k between the two three-point arms
/// `prev - p` and `next - p`. Throws DegenerateGeometryError when an arm has
/// zero length.
double interior_angle(Point2 prev, Point2 p, Point2 next);

struct AngleOptions {
  AngleMode mode = AngleMode::Tangent;
  /// Points ignored at both ends of an arc when fitting its tangent.
  int trim = 9;
};

/// Angle at candidate `k` against its nearest surviving candidates along the
/// curve (or the curve endpoints when there is none on a side). `candidates`
/// is sorted by index and contains k.
double corner_angle(const Curve& curve, const std::vector<std::size_t>& candidates, std::size_t k,
                    const AngleOptions& options = {});

/// Removes candidates whose corner_angle exceeds `delta_deg`. In iterative
/// mode candidates are visited in ascending curvature and angles are
/// recomputed after every removal until a full sweep removes nothing.
std::vector<std::size_t> refine_angle(const std::vector<std::size_t>& candidates, const CurvatureProfile& profile,
                                      const Curve& curve, double delta_deg, const AngleOptions& options = {},
                                      AngleRefinement refinement = AngleRefinement::Iterative);

}  // namespace sca
