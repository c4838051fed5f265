#include "sca/detector.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "sca/errors.hpp"

namespace sca {

std::vector<Corner> detect_on_curve(const Curve& raw, int curve_id, const DetectorParams& params,
                                    OpCounters& counters, DetectionDiagnostics* diag) {
  const SmoothResult smoothed = smooth_curve_checked(raw, params.curve_sigma);
  if (diag && smoothed.unchanged_too_short) ++diag->curves_too_short_to_smooth;
  ResampledCurve resampled;
  if (params.resample_step > 0.0) {
    resampled = resample_curve(smoothed.curve, params.resample_step);
  } else {
    resampled.curve = smoothed.curve;
    for (std::size_t i = 0; i < raw.size(); ++i) resampled.source_index.push_back(i);
  }
  const Curve& curve = resampled.curve;

  std::vector<CurvatureProfile> profiles;
  profiles.reserve(params.chord_lengths.size());
  for (int chord : params.chord_lengths) {
    profiles.push_back(accumulate(curve, chord, &counters, curve_id));
    normalize(profiles.back());
  }
  CurvatureProfile profile =
      params.mode == DetectorMode::Cpda ? combine_cpda(profiles) : std::move(profiles.front());
  if (profile.cornerless) return {};

  const std::vector<std::size_t> candidates = local_maxima(profile);
  const std::vector<std::size_t> strong = refine_curvature(candidates, profile, params.curvature_threshold);
  const AngleOptions angle{params.angle_mode, static_cast<int>(std::ceil(3.0 * params.curve_sigma))};
  const std::vector<std::size_t> kept =
      refine_angle(strong, profile, curve, params.angle_threshold_deg, angle, params.angle_refinement);
  if (diag) {
    diag->candidates += candidates.size();
    diag->after_curvature_refinement += strong.size();
    diag->after_angle_refinement += kept.size();
  }

  std::vector<Corner> out;
  out.reserve(kept.size());
  for (std::size_t k : kept)
    out.push_back({raw.points[resampled.source_index[k]], profile.combined[k], curve_id, false});
  return out;
}

DetectionResult detect(const GrayImage& img, const DetectorParams& params, const std::string& image_id) {
  params.validate();
  DetectionResult result;
  result.corners.image_id = image_id;

  const EdgeMap edges = canny(img, params.canny);
  result.diagnostics.edge_pixels = edges.count();
  const CurveExtraction extraction = extract_curves_with_junctions(edges, params.effective_min_curve_length());
  result.diagnostics.curves = extraction.curves.size();

  std::vector<Corner> junction_corners;
  const double r2 = params.junction_merge_radius * params.junction_merge_radius;
  auto near_any = [r2](const std::vector<Corner>& set, Point2 p) {
    for (const Corner& c : set) {
      const Point2 d = c.position - p;
      if (dot(d, d) <= r2) return true;
    }
    return false;
  };
  for (const TJunction& j : extraction.junctions)
    if (!near_any(junction_corners, j.position)) junction_corners.push_back({j.position, 1.0, -1, true});
  result.diagnostics.t_junctions = junction_corners.size();

  std::vector<Corner>& out = result.corners.corners;
  out = junction_corners;
  for (std::size_t i = 0; i < extraction.curves.size(); ++i) {
    for (const Corner& c :
         detect_on_curve(extraction.curves[i], static_cast<int>(i), params, result.counters, &result.diagnostics))
      if (!near_any(junction_corners, c.position)) out.push_back(c);
  }
  return result;
}

void write_corner_csv_header(std::ostream& os) { os << "image_id,detector,x,y,curvature,is_t_junction\n"; }

void write_corner_csv_rows(std::ostream& os, const CornerSet& set, const std::string& detector) {
  std::ostringstream line;
  line << std::fixed << std::setprecision(6);
  for (const Corner& c : set.corners) {
    line.str("");
    line << set.image_id << ',' << detector << ',' << c.position.x << ',' << c.position.y << ',' << c.curvature
         << ',' << (c.is_t_junction ? 1 : 0) << '\n';
    os << line.str();
  }
}

std::vector<std::pair<std::string, CornerSet>> read_corner_csv(std::istream& is) {
  std::vector<std::pair<std::string, CornerSet>> out;
  std::map<std::string, std::size_t> index;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line.rfind("image_id,", 0) == 0) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 6) throw IoError("corner CSV row has " + std::to_string(f.size()) + " fields");
    Corner c;
    try {
      c.position = {std::stod(f[2]), std::stod(f[3])};
      c.curvature = std::stod(f[4]);
      c.is_t_junction = f[5] == "1";
    } catch (const std::exception&) {
      throw IoError("malformed corner CSV row: " + line);
    }
    auto [it, inserted] = index.emplace(f[1] + '\n' + f[0], out.size());
    if (inserted) out.push_back({f[1], CornerSet{f[0], {}}});
    out[it->second].second.corners.push_back(c);
  }
  return out;
}

RgbImage render_overlay(const GrayImage& img, const CornerSet& corners, int arm) {
  RgbImage out{img, img, img};
  auto paint = [&](int x, int y, double r, double g, double b) {
    if (x < 0 || y < 0 || x >= img.width() || y >= img.height()) return;
    out.r.at(x, y) = r;
    out.g.at(x, y) = g;
    out.b.at(x, y) = b;
  };
  for (const Corner& c : corners.corners) {
    const int cx = static_cast<int>(std::lround(c.position.x));
    const int cy = static_cast<int>(std::lround(c.position.y));
    const double r = c.is_t_junction ? 0.0 : 1.0;
    const double g = c.is_t_junction ? 1.0 : 0.0;
    for (int d = -arm; d <= arm; ++d) {
      paint(cx + d, cy, r, g, 0.0);
      paint(cx, cy + d, r, g, 0.0);
    }
  }
  return out;
}

}  // namespace sca
