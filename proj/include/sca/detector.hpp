#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sca/curvature.hpp"
#include "sca/image.hpp"

namespace sca {

struct Corner {
  Point2 position;
  double curvature = 0.0;  // combined normalized curvature; 1 for T-junctions
  int curve_id = -1;       // -1 for T-junctions
  bool is_t_junction = false;
};

struct CornerSet {
  std::string image_id;
  std::vector<Corner> corners;

  std::size_t size() const { return corners.size(); }
};

struct DetectionDiagnostics {
  std::size_t edge_pixels = 0;
  std::size_t curves = 0;
  std::size_t curves_too_short_to_smooth = 0;
  std::size_t candidates = 0;
  std::size_t after_curvature_refinement = 0;
  std::size_t after_angle_refinement = 0;
  std::size_t t_junctions = 0;
};

struct DetectionResult {
  CornerSet corners;
  OpCounters counters;
  DetectionDiagnostics diagnostics;
};

/// Corner detection on already extracted curves: smoothing, accumulation
/// over every chord length, normalization (and product for CPDA), local
/// maxima, and both refinements. Corner positions are the unsmoothed curve
/// points.
std::vector<Corner> detect_on_curve(const Curve& curve, int curve_id, const DetectorParams& params,
                                    OpCounters& counters, DetectionDiagnostics* diag = nullptr);

/// Full pipeline: Canny, curve extraction, T-junctions, curve corners, and
/// the union with T-junctions (a T-junction absorbs curve corners within
/// junction_merge_radius).
DetectionResult detect(const GrayImage& img, const DetectorParams& params, const std::string& image_id = "");

/// CSV header "image_id,detector,x,y,curvature,is_t_junction".
void write_corner_csv_header(std::ostream& os);
void write_corner_csv_rows(std::ostream& os, const CornerSet& set, const std::string& detector);

/// Parses rows written by write_corner_csv_rows (header optional). One entry
/// per (detector, image_id) pair in first-seen order; `first` is the detector.
std::vector<std::pair<std::string, CornerSet>> read_corner_csv(std::istream& is);

/// Draws a cross of half-size `arm` at every corner; T-junctions in green,
/// curvature corners in red.
RgbImage render_overlay(const GrayImage& img, const CornerSet& corners, int arm = 3);

}  // namespace sca
