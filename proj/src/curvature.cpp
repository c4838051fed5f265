#include "sca/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "sca/errors.hpp"

namespace sca {

DetectorParams DetectorParams::cpda() {
  DetectorParams p;
  p.mode = DetectorMode::Cpda;
  p.chord_lengths = {10, 20, 30};
  p.curvature_threshold = 0.2;
  return p;
}

DetectorParams DetectorParams::sca() { return DetectorParams{}; }

int DetectorParams::max_chord() const {
  return chord_lengths.empty() ? 0 : *std::max_element(chord_lengths.begin(), chord_lengths.end());
}

std::size_t DetectorParams::effective_min_curve_length() const {
  return min_curve_length > 0 ? min_curve_length : std::size_t(2 * max_chord() + 2);
}

std::string DetectorParams::name() const { return mode == DetectorMode::Cpda ? "cpda" : "sca"; }

void DetectorParams::validate() const {
  if (chord_lengths.empty()) throw ParameterError("at least one chord length is required");
  for (int l : chord_lengths)
    if (l < 3) throw ParameterError("chord lengths must be >= 3");
  if (!(curvature_threshold > 0.0 && curvature_threshold < 1.0))
    throw ParameterError("curvature threshold must lie in (0, 1)");
  if (!(angle_threshold_deg > 90.0 && angle_threshold_deg < 180.0))
    throw ParameterError("angle threshold must lie in (90, 180) degrees");
  if (!(curve_sigma > 0.0)) throw ParameterError("curve smoothing sigma must be positive");
  if (!(resample_step >= 0.0)) throw ParameterError("resampling step must be non-negative");
  if (!(junction_merge_radius >= 0.0)) throw ParameterError("junction merge radius must be non-negative");
}

double chord_point_distance(Point2 p, Point2 a, Point2 b, OpCounters* counters) {
  const Point2 ab = b - a;
  if (ab.x == 0.0 && ab.y == 0.0) throw DegenerateGeometryError("chord endpoints coincide");
  const double len = std::sqrt(dot(ab, ab));
  if (counters) {
    ++counters->sqrt_evals;
    ++counters->distance_evals;
  }
  return std::abs(cross(ab, p - a)) / len;
}

CurvatureProfile accumulate(const Curve& curve, int chord, OpCounters* counters, int curve_id,
                            PlacementBounds bounds) {
  if (chord < 1) throw ParameterError("chord length must be positive");
  const long n = static_cast<long>(curve.size());
  CurvatureProfile prof;
  prof.curve_id = curve_id;
  prof.chord_length = chord;
  prof.closed = curve.closed;
  prof.h.assign(curve.size(), 0.0);
  prof.valid.assign(curve.size(), 0);
  if (n <= 2L * chord) return prof;

  const auto& pts = curve.points;
  auto wrap = [n](long i) { return ((i % n) + n) % n; };

  // A chord placement is identified by its first endpoint j; its norm does
  // not depend on which interior point is measured, so it is computed once.
  std::vector<double> chord_norm(curve.size(), -1.0);
  OpCounters local;
  auto norm_of = [&](long j) {
    double& cached = chord_norm[j];
    if (cached < 0.0) {
      const Point2 ab = pts[wrap(j + chord)] - pts[j];
      cached = std::sqrt(dot(ab, ab));
      ++local.sqrt_evals;
    }
    return cached;
  };

  const long first = curve.closed ? 0 : chord;
  const long last = curve.closed ? n - 1 : n - 1 - chord;
  const long lo = bounds == PlacementBounds::Interior ? -chord + 1 : -chord;
  const long hi = bounds == PlacementBounds::Interior ? -1 : 0;
  for (long k = first; k <= last; ++k) {
    const Point2 p = pts[k];
    double sum = 0.0;
    for (long off = lo; off <= hi; ++off) {
      const long j = wrap(k + off);
      const Point2 a = pts[j];
      const Point2 b = pts[wrap(j + chord)];
      const double len = norm_of(j);
      ++local.distance_evals;
      if (len > 0.0) {
        sum += std::abs(cross(b - a, p - a)) / len;
      } else {
        // curve folded back onto itself: fall back to the point distance
        sum += distance(p, a);
        ++local.sqrt_evals;
      }
    }
    prof.h[k] = sum;
    prof.valid[k] = 1;
  }
  if (counters) *counters += local;
  return prof;
}

void normalize(CurvatureProfile& profile) {
  // rounding noise on collinear points is ~1e-13 px; never a real bend
  constexpr double kFlatTolerance = 1e-9;
  double hmax = 0.0;
  for (std::size_t i = 0; i < profile.size(); ++i)
    if (profile.valid[i]) hmax = std::max(hmax, profile.h[i]);
  profile.h_norm.assign(profile.size(), 0.0);
  profile.cornerless = !(hmax > kFlatTolerance);
  if (!profile.cornerless)
    for (std::size_t i = 0; i < profile.size(); ++i)
      if (profile.valid[i]) profile.h_norm[i] = profile.h[i] / hmax;
  profile.combined = profile.h_norm;
}

CurvatureProfile combine_cpda(std::span<const CurvatureProfile> profiles) {
  if (profiles.empty()) throw InputError("no profiles to combine");
  const CurvatureProfile& ref = profiles.front();
  for (const auto& p : profiles) {
    if (p.curve_id != ref.curve_id) throw InputError("profiles belong to different curves");
    if (p.size() != ref.size() || p.h_norm.size() != ref.size())
      throw InputError("profiles differ in length or are not normalized");
  }
  CurvatureProfile out = ref;
  out.chord_length = 0;
  out.cornerless = false;
  for (std::size_t i = 0; i < out.size(); ++i) {
    double v = 1.0;
    bool ok = true;
    for (const auto& p : profiles) {
      v *= p.h_norm[i];
      ok = ok && p.valid[i];
      out.cornerless = out.cornerless || p.cornerless;
    }
    out.valid[i] = ok ? 1 : 0;
    out.combined[i] = ok ? v : 0.0;
  }
  return out;
}

std::vector<std::size_t> local_maxima(const CurvatureProfile& profile) {
  const auto& v = profile.combined;
  const std::size_t n = v.size();
  std::vector<std::size_t> out;
  if (n < 3) return out;

  if (profile.closed) {
    if (std::find(profile.valid.begin(), profile.valid.end(), 0) != profile.valid.end()) return out;
    std::size_t start = n;
    for (std::size_t i = 0; i < n; ++i)
      if (v[i] != v[(i + n - 1) % n]) {
        start = i;
        break;
      }
    if (start == n) return out;  // constant around the loop
    std::size_t i = start;
    std::size_t visited = 0;
    while (visited < n) {
      std::size_t e = i;
      std::size_t len = 1;
      while (len < n && v[(e + 1) % n] == v[i]) {
        e = (e + 1) % n;
        ++len;
      }
      if (v[(i + n - 1) % n] < v[i] && v[(e + 1) % n] < v[i]) out.push_back(i);
      visited += len;
      i = (e + 1) % n;
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::size_t i = 0;
  while (i < n) {
    if (!profile.valid[i]) {
      ++i;
      continue;
    }
    std::size_t e = i;
    while (e + 1 < n && profile.valid[e + 1] && v[e + 1] == v[i]) ++e;
    const bool left = i > 0 && profile.valid[i - 1] && v[i - 1] < v[i];
    const bool right = e + 1 < n && profile.valid[e + 1] && v[e + 1] < v[i];
    if (left && right) out.push_back(i);
    i = e + 1;
  }
  return out;
}

std::vector<std::size_t> refine_curvature(const std::vector<std::size_t>& candidates,
                                          const CurvatureProfile& profile, double threshold) {
  std::vector<std::size_t> out;
  for (std::size_t k : candidates)
    if (!(profile.combined[k] < threshold)) out.push_back(k);
  return out;
}

double interior_angle(Point2 prev, Point2 p, Point2 next) {
  const Point2 u = prev - p;
  const Point2 v = next - p;
  const double nu = norm(u);
  const double nv = norm(v);
  if (nu == 0.0 || nv == 0.0) throw DegenerateGeometryError("angle arm has zero length");
  const double c = std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
  return std::acos(c) * 180.0 / M_PI;
}

namespace {

Point2 unit(Point2 d) {
  const double n = norm(d);
  if (n == 0.0) throw DegenerateGeometryError("zero-length direction");
  return (1.0 / n) * d;
}

// Unit direction in which `arc` leaves its first point. Straight arcs give
// the chord direction; curved arcs give the tangent of a least-squares circle
// fitted to the arc with `trim` points dropped at each end.
Point2 arc_tangent(const Polyline& arc, int trim) {
  const std::size_t n = arc.size();
  if (n < 2) throw DegenerateGeometryError("arc has fewer than two points");
  const Point2 origin = arc.front();
  if (n < 5) return unit(arc.back() - origin);

  // short arcs keep most of their points: a tiny fitted sub-arc is noise
  const std::size_t keep = static_cast<std::size_t>(std::max(trim, 0));
  const std::size_t m = n >= 3 * keep ? keep : n / 4;
  // only the stretch next to the candidate describes its tangent
  const std::size_t stop = std::min(n - m, m + 2 * std::max<std::size_t>(keep, 4));
  const std::span<const Point2> sub(arc.data() + m, stop - m);

  Point2 centroid;
  for (Point2 q : sub) centroid = centroid + q;
  centroid = (1.0 / double(sub.size())) * centroid;

  double extent = 0.0;
  double sxx = 0, sxy = 0, syy = 0;
  for (Point2 q : sub) {
    const Point2 d = q - centroid;
    extent = std::max(extent, norm(d));
    sxx += d.x * d.x;
    sxy += d.x * d.y;
    syy += d.y * d.y;
  }
  if (extent == 0.0) return unit(arc.back() - origin);

  auto line_direction = [&]() {
    const double theta = 0.5 * std::atan2(2 * sxy, sxx - syy);
    Point2 d{std::cos(theta), std::sin(theta)};
    const Point2 toward = centroid - origin;
    if (dot(d, toward) < 0) d = -1.0 * d;
    if (norm(toward) == 0.0) return unit(arc.back() - origin);
    return d;
  };

  // Taubin circle fit (Newton iteration on the characteristic polynomial)
  // in coordinates centered on the centroid.
  double mxx = 0, myy = 0, mxy = 0, mxz = 0, myz = 0, mzz = 0;
  for (Point2 q : sub) {
    const double u = q.x - centroid.x;
    const double v = q.y - centroid.y;
    const double z = u * u + v * v;
    mxx += u * u;
    myy += v * v;
    mxy += u * v;
    mxz += u * z;
    myz += v * z;
    mzz += z * z;
  }
  const double cnt = double(sub.size());
  mxx /= cnt, myy /= cnt, mxy /= cnt, mxz /= cnt, myz /= cnt, mzz /= cnt;
  const double mz = mxx + myy;
  const double cov_xy = mxx * myy - mxy * mxy;
  const double var_z = mzz - mz * mz;
  const double a3 = 4 * mz;
  const double a2 = -3 * mz * mz - mzz;
  const double a1 = var_z * mz + 4 * cov_xy * mz - mxz * mxz - myz * myz;
  const double a0 = mxz * (mxz * myy - myz * mxy) + myz * (myz * mxx - mxz * mxy) - var_z * cov_xy;
  double root = 0.0;
  double val = a0;
  for (int it = 0; it < 99; ++it) {
    const double slope = a1 + root * (2 * a2 + 3 * a3 * root);
    if (slope == 0.0) break;
    const double next = root - val / slope;
    if (!std::isfinite(next)) break;
    if (std::abs(next - root) <= 1e-12 * std::max(1.0, std::abs(next))) {
      root = next;
      break;
    }
    const double next_val = a0 + next * (a1 + next * (a2 + next * a3));
    if (std::abs(next_val) >= std::abs(val)) break;
    root = next;
    val = next_val;
  }
  const double det = root * root - root * mz + cov_xy;
  if (std::abs(det) < 1e-300) return line_direction();
  const double cx = (mxz * (myy - root) - myz * mxy) / det / 2;
  const double cy = (myz * (mxx - root) - mxz * mxy) / det / 2;
  const double radius = std::sqrt(cx * cx + cy * cy + mz);
  // nearly straight arcs are treated as lines
  if (!std::isfinite(radius) || radius > 20.0 * extent) return line_direction();

  const Point2 center{centroid.x + cx, centroid.y + cy};
  const Point2 radial = origin - center;
  if (norm(radial) == 0.0) return line_direction();
  Point2 t{-radial.y, radial.x};
  if (dot(t, centroid - origin) < 0) t = -1.0 * t;
  return unit(t);
}

Polyline collect_arc(const Curve& curve, std::size_t from, std::size_t to, int step) {
  const std::size_t n = curve.size();
  Polyline arc{curve.points[from]};
  std::size_t i = from;
  while (i != to) {
    i = static_cast<std::size_t>((static_cast<long>(i) + step + static_cast<long>(n)) % static_cast<long>(n));
    arc.push_back(curve.points[i]);
  }
  return arc;
}

}  // namespace

double corner_angle(const Curve& curve, const std::vector<std::size_t>& candidates, std::size_t k,
                    const AngleOptions& options) {
  const auto it = std::lower_bound(candidates.begin(), candidates.end(), k);
  if (it == candidates.end() || *it != k) throw InputError("corner_angle: k is not a candidate");
  const std::size_t pos = static_cast<std::size_t>(it - candidates.begin());
  const std::size_t n = curve.size();
  const std::size_t m = candidates.size();

  std::size_t prev, next;
  if (curve.closed) {
    if (m == 1) {
      // lone candidate on a loop: neighbors a third of the way round
      prev = (k + n - n / 3) % n;
      next = (k + n / 3) % n;
    } else {
      prev = candidates[(pos + m - 1) % m];
      next = candidates[(pos + 1) % m];
    }
  } else {
    prev = pos > 0 ? candidates[pos - 1] : 0;
    next = pos + 1 < m ? candidates[pos + 1] : n - 1;
  }

  if (options.mode == AngleMode::Chord) return interior_angle(curve.points[prev], curve.points[k], curve.points[next]);

  if (prev == k || next == k) throw DegenerateGeometryError("candidate coincides with its neighbor");
  const Point2 back = arc_tangent(collect_arc(curve, k, prev, -1), options.trim);
  const Point2 fwd = arc_tangent(collect_arc(curve, k, next, +1), options.trim);
  return std::acos(std::clamp(dot(back, fwd), -1.0, 1.0)) * 180.0 / M_PI;
}

std::vector<std::size_t> refine_angle(const std::vector<std::size_t>& candidates, const CurvatureProfile& profile,
                                      const Curve& curve, double delta_deg, const AngleOptions& options,
                                      AngleRefinement refinement) {
  std::vector<std::size_t> survivors = candidates;
  std::sort(survivors.begin(), survivors.end());

  auto is_false_corner = [&](const std::vector<std::size_t>& set, std::size_t k) {
    try {
      return corner_angle(curve, set, k, options) > delta_deg;
    } catch (const DegenerateGeometryError&) {
      return false;  // no usable geometry: keep the candidate
    }
  };

  if (refinement == AngleRefinement::SinglePass) {
    std::vector<std::size_t> out;
    for (std::size_t k : survivors)
      if (!is_false_corner(survivors, k)) out.push_back(k);
    return out;
  }

  bool removed = true;
  while (removed && !survivors.empty()) {
    removed = false;
    std::vector<std::size_t> order = survivors;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return profile.combined[a] < profile.combined[b]; });
    for (std::size_t k : order) {
      if (is_false_corner(survivors, k)) {
        survivors.erase(std::find(survivors.begin(), survivors.end(), k));
        removed = true;
      }
    }
  }
  return survivors;
}

}  // namespace sca
