#include "sca/contour.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <optional>
#include <sstream>

#include "sca/errors.hpp"
#include "sca/image.hpp"

namespace sca {

namespace {

// Ring order N, NE, E, SE, S, SW, W, NW.
constexpr int kDx[8] = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr int kDy[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
// 4-neighbors first, then diagonals.
constexpr int kWalkOrder[8] = {0, 2, 4, 6, 1, 3, 5, 7};

struct Pixel {
  int x = 0;
  int y = 0;
  friend bool operator==(Pixel, Pixel) = default;
};

bool adjacent8(Pixel a, Pixel b) {
  return !(a == b) && std::abs(a.x - b.x) <= 1 && std::abs(a.y - b.y) <= 1;
}

int neighbor_count(const EdgeMap& edges, int x, int y) {
  int n = 0;
  for (int d = 0; d < 8; ++d) n += edges.test(x + kDx[d], y + kDy[d]);
  return n;
}

// True when `to` is reachable from `from` along edge pixels in at most
// `depth` steps.
bool connected_within(const EdgeMap& edges, Pixel from, Pixel to, int depth) {
  std::deque<std::pair<Pixel, int>> queue{{from, 0}};
  std::vector<Pixel> seen{from};
  while (!queue.empty()) {
    auto [p, dist] = queue.front();
    queue.pop_front();
    if (p == to) return true;
    if (dist == depth) continue;
    for (int d = 0; d < 8; ++d) {
      Pixel q{p.x + kDx[d], p.y + kDy[d]};
      if (!edges.test(q.x, q.y) || std::find(seen.begin(), seen.end(), q) != seen.end()) continue;
      seen.push_back(q);
      queue.emplace_back(q, dist + 1);
    }
  }
  return false;
}

// Connected groups among ring members `dirs` (indices into kDx/kDy), using
// 4- or 8-adjacency. With `touch4` only groups holding a 4-neighbor of the
// center count.
int ring_groups(const int* dirs, int n, bool four, bool touch4) {
  int parent[8];
  for (int i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i];
    return i;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const int ddx = std::abs(kDx[dirs[i]] - kDx[dirs[j]]);
      const int ddy = std::abs(kDy[dirs[i]] - kDy[dirs[j]]);
      if (four ? ddx + ddy != 1 : (ddx > 1 || ddy > 1)) continue;
      parent[find(i)] = find(j);
    }
  bool counted[8] = {};
  int groups = 0;
  for (int i = 0; i < n; ++i) {
    if (touch4 && kDx[dirs[i]] != 0 && kDy[dirs[i]] != 0) continue;
    const int r = find(i);
    if (!counted[r]) {
      counted[r] = true;
      ++groups;
    }
  }
  return groups;
}

}  // namespace

int branch_count(const EdgeMap& edges, int x, int y) {
  int transitions = 0;
  for (int d = 0; d < 8; ++d) {
    const bool cur = edges.test(x + kDx[d], y + kDy[d]);
    const bool next = edges.test(x + kDx[(d + 1) % 8], y + kDy[(d + 1) % 8]);
    if (!cur && next) ++transitions;
  }
  // a fully populated ring has no 0->1 transition but is one blob
  if (transitions == 0 && neighbor_count(edges, x, y) == 8) return 1;
  return transitions;
}

std::vector<TJunction> detect_t_junctions(const EdgeMap& edges) {
  std::vector<TJunction> out;
  for (int y = 0; y < edges.height(); ++y)
    for (int x = 0; x < edges.width(); ++x) {
      if (!edges.test(x, y)) continue;
      const int degree = branch_count(edges, x, y);
      if (degree >= 3) out.push_back({{double(x), double(y)}, degree});
    }
  return out;
}

EdgeMap bridge_gaps(const EdgeMap& edges) {
  EdgeMap out = edges;
  std::vector<Pixel> endpoints;
  for (int y = 0; y < edges.height(); ++y)
    for (int x = 0; x < edges.width(); ++x)
      if (edges.test(x, y) && neighbor_count(edges, x, y) >= 1 && branch_count(edges, x, y) == 1)
        endpoints.push_back({x, y});

  std::vector<bool> used(endpoints.size(), false);
  for (std::size_t i = 0; i < endpoints.size(); ++i) {
    if (used[i]) continue;
    for (std::size_t j = i + 1; j < endpoints.size(); ++j) {
      if (used[j]) continue;
      const Pixel a = endpoints[i];
      const Pixel b = endpoints[j];
      const int cheb = std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
      if (cheb != 2) continue;
      // both ends of one tiny chain: bridging would only make a knot
      if (connected_within(edges, a, b, 4)) continue;
      const Pixel mid{(a.x + b.x) >> 1, (a.y + b.y) >> 1};
      if (out.test(mid.x, mid.y) || !adjacent8(mid, a) || !adjacent8(mid, b)) continue;
      out.set(mid.x, mid.y);
      used[i] = used[j] = true;
      break;
    }
  }
  return out;
}

EdgeMap extend_endpoints(const EdgeMap& edges, int max_gap) {
  EdgeMap out = edges;
  if (max_gap <= 0) return out;
  for (int y = 0; y < edges.height(); ++y)
    for (int x = 0; x < edges.width(); ++x) {
      if (!edges.test(x, y) || neighbor_count(edges, x, y) != 1) continue;
      // walk back along the chain to estimate the outgoing direction
      std::vector<Pixel> tail{{x, y}};
      while (tail.size() < 6) {
        const Pixel cur = tail.back();
        Pixel next{};
        int options = 0;
        for (int d = 0; d < 8; ++d) {
          const Pixel q{cur.x + kDx[d], cur.y + kDy[d]};
          if (!edges.test(q.x, q.y) || std::find(tail.begin(), tail.end(), q) != tail.end()) continue;
          if (tail.size() >= 2 && adjacent8(q, tail[tail.size() - 2])) continue;
          next = q;
          ++options;
        }
        if (options != 1) break;
        tail.push_back(next);
      }
      if (tail.size() < 4) continue;
      const double vx = x - tail.back().x, vy = y - tail.back().y;
      const double len = std::hypot(vx, vy);
      if (len == 0.0) continue;
      std::vector<Pixel> path;
      for (int s = 1; s <= max_gap; ++s) {
        const Pixel q{x + int(std::lround(s * vx / len)), y + int(std::lround(s * vy / len))};
        if (q.x < 0 || q.y < 0 || q.x >= edges.width() || q.y >= edges.height() || edges.test(q.x, q.y)) break;
        path.push_back(q);
        // does q touch an edge pixel of another branch?
        bool hit = false;
        for (int d = 0; d < 8 && !hit; ++d) {
          const Pixel m{q.x + kDx[d], q.y + kDy[d]};
          if (!edges.test(m.x, m.y) || std::find(tail.begin(), tail.end(), m) != tail.end()) continue;
          hit = !connected_within(edges, {x, y}, m, 12);
        }
        if (hit) {
          for (const Pixel& p : path) out.set(p.x, p.y);
          break;
        }
      }
    }
  return out;
}

EdgeMap thin_edges(const EdgeMap& edges) {
  EdgeMap out = edges;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int y = 0; y < out.height(); ++y)
      for (int x = 0; x < out.width(); ++x) {
        if (!out.test(x, y)) continue;
        int fg[8], bg[8];
        int n = 0, m = 0;
        for (int d = 0; d < 8; ++d) {
          if (out.test(x + kDx[d], y + kDy[d])) fg[n++] = d;
          else bg[m++] = d;
        }
        if (n < 3) continue;
        // Simple-point test: the foreground ring is one 8-connected group
        // and exactly one 4-connected background group touches a 4-neighbor,
        // so removal neither splits a chain nor opens a hole.
        const int groups = ring_groups(fg, n, false, false) == 1 && ring_groups(bg, m, true, true) == 1 ? 1 : 0;
        if (groups == 1) {
          out.set(x, y, false);
          changed = true;
        }
      }
  }
  return out;
}

EdgeMap prune_spurs(const EdgeMap& edges, int max_length) {
  EdgeMap out = edges;
  if (max_length <= 0) return out;
  for (int y = 0; y < edges.height(); ++y)
    for (int x = 0; x < edges.width(); ++x) {
      if (!edges.test(x, y) || branch_count(edges, x, y) != 1) continue;
      std::vector<Pixel> path{{x, y}};
      bool reached_junction = false;
      while (static_cast<int>(path.size()) <= max_length) {
        const Pixel cur = path.back();
        std::optional<Pixel> next;
        int options = 0;
        for (int d : kWalkOrder) {
          const Pixel q{cur.x + kDx[d], cur.y + kDy[d]};
          if (!edges.test(q.x, q.y) || std::find(path.begin(), path.end(), q) != path.end()) continue;
          if (path.size() >= 2 && adjacent8(q, path[path.size() - 2])) continue;
          if (!next) next = q;
          ++options;
        }
        if (!next) break;
        if (branch_count(edges, next->x, next->y) >= 3) {
          reached_junction = true;
          break;
        }
        if (options > 1) break;
        path.push_back(*next);
      }
      if (reached_junction && static_cast<int>(path.size()) <= max_length)
        for (Pixel p : path) out.set(p.x, p.y, false);
    }
  return out;
}

CurveExtraction extract_curves_with_junctions(const EdgeMap& input, std::size_t min_curve_length,
                                              int max_spur_length) {
  const EdgeMap edges = prune_spurs(extend_endpoints(bridge_gaps(thin_edges(input)), 3), max_spur_length);
  const int w = edges.width();
  const int h = edges.height();

  CurveExtraction result;
  result.junctions = detect_t_junctions(edges);
  std::vector<unsigned char> is_junction(std::size_t(w) * h, 0);
  for (const auto& j : result.junctions) is_junction[std::size_t(j.position.y) * w + std::size_t(j.position.x)] = 1;
  std::vector<unsigned char> visited(std::size_t(w) * h, 0);

  auto junction_at = [&](int x, int y) { return edges.inside(x, y) && is_junction[std::size_t(y) * w + x]; };
  auto free_at = [&](int x, int y) {
    return edges.test(x, y) && !is_junction[std::size_t(y) * w + x] && !visited[std::size_t(y) * w + x];
  };
  auto mark = [&](Pixel p) { visited[std::size_t(p.y) * w + p.x] = 1; };

  auto finish = [&](std::vector<Pixel>& chain, bool closed) {
    Curve c;
    c.closed = closed;
    c.points.reserve(chain.size());
    for (Pixel p : chain) c.points.push_back({double(p.x), double(p.y)});
    if (c.size() >= min_curve_length) {
      result.curves.push_back(std::move(c));
    } else {
      for (Pixel p : chain)
        if (!junction_at(p.x, p.y)) result.discarded.push_back({double(p.x), double(p.y)});
    }
  };

  auto trace = [&](Pixel start, std::optional<Pixel> origin) {
    std::vector<Pixel> chain;
    if (origin) chain.push_back(*origin);
    chain.push_back(start);
    mark(start);
    Pixel cur = start;
    std::size_t walked = 1;
    while (true) {
      // stop as soon as a junction (other than the one just left) touches us
      std::optional<Pixel> stop;
      for (int d : kWalkOrder) {
        const Pixel q{cur.x + kDx[d], cur.y + kDy[d]};
        if (!junction_at(q.x, q.y)) continue;
        if (origin && q == *origin && walked < 3) continue;
        stop = q;
        break;
      }
      if (stop) {
        chain.push_back(*stop);
        break;
      }
      std::optional<Pixel> next;
      for (int d : kWalkOrder) {
        const Pixel q{cur.x + kDx[d], cur.y + kDy[d]};
        if (free_at(q.x, q.y)) {
          next = q;
          break;
        }
      }
      if (!next) break;
      chain.push_back(*next);
      mark(*next);
      cur = *next;
      ++walked;
    }

    bool closed = false;
    if (chain.size() > 3 && chain.front() == chain.back() && junction_at(chain.front().x, chain.front().y)) {
      chain.pop_back();
      closed = true;
    }
    finish(chain, closed);
  };

  // open chains from their endpoints
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!free_at(x, y) || branch_count(edges, x, y) > 1) continue;
      std::optional<Pixel> origin;
      for (int d : kWalkOrder)
        if (junction_at(x + kDx[d], y + kDy[d])) {
          origin = Pixel{x + kDx[d], y + kDy[d]};
          break;
        }
      trace({x, y}, origin);
    }

  // chains hanging off junctions
  for (const auto& j : result.junctions) {
    const Pixel jp{int(j.position.x), int(j.position.y)};
    for (int d : kWalkOrder)
      if (free_at(jp.x + kDx[d], jp.y + kDy[d])) trace({jp.x + kDx[d], jp.y + kDy[d]}, jp);
  }

  // what remains are isolated loops
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!free_at(x, y)) continue;
      std::vector<Pixel> chain{{x, y}};
      mark({x, y});
      Pixel cur{x, y};
      while (true) {
        std::optional<Pixel> next;
        for (int d : kWalkOrder)
          if (free_at(cur.x + kDx[d], cur.y + kDy[d])) {
            next = Pixel{cur.x + kDx[d], cur.y + kDy[d]};
            break;
          }
        if (!next) break;
        chain.push_back(*next);
        mark(*next);
        cur = *next;
      }
      finish(chain, chain.size() > 2 && adjacent8(chain.front(), chain.back()));
    }

  return result;
}

std::vector<Curve> extract_curves(const EdgeMap& edges, std::size_t min_curve_length) {
  return extract_curves_with_junctions(edges, min_curve_length).curves;
}

SmoothResult smooth_curve_checked(const Curve& curve, double sigma) {
  const std::vector<double> k = gaussian_kernel(sigma);
  const int half = static_cast<int>(k.size() / 2);
  const int n = static_cast<int>(curve.size());
  if (n < 2 * half + 2) return {curve, true};

  Curve out;
  out.closed = curve.closed;
  out.points.resize(curve.size());
  for (int i = 0; i < n; ++i) {
    Point2 acc;
    for (int t = -half; t <= half; ++t) {
      int j = i + t;
      if (curve.closed)
        j = ((j % n) + n) % n;
      else
        j = std::clamp(j, 0, n - 1);
      acc = acc + k[t + half] * curve.points[j];
    }
    out.points[i] = acc;
  }
  return {std::move(out), false};
}

Curve smooth_curve(const Curve& curve, double sigma) { return smooth_curve_checked(curve, sigma).curve; }

ResampledCurve resample_curve(const Curve& curve, double step) {
  if (!(step > 0.0)) throw ParameterError("resampling step must be positive");
  const std::size_t n = curve.size();
  ResampledCurve out;
  out.curve.closed = curve.closed;
  if (n < 2) {
    out.curve = curve;
    for (std::size_t i = 0; i < n; ++i) out.source_index.push_back(i);
    return out;
  }
  const std::size_t segments = curve.closed ? n : n - 1;
  std::vector<double> cum(segments + 1, 0.0);
  for (std::size_t i = 0; i < segments; ++i)
    cum[i + 1] = cum[i] + distance(curve.points[i], curve.points[(i + 1) % n]);
  const double total = cum.back();
  if (total <= 0.0) {
    out.curve = curve;
    for (std::size_t i = 0; i < n; ++i) out.source_index.push_back(i);
    return out;
  }

  const std::size_t count = curve.closed ? std::max<std::size_t>(1, std::size_t(std::floor(total / step)))
                                         : std::size_t(std::floor(total / step)) + 1;
  // closed loops get a step that divides the perimeter evenly
  const double h = curve.closed ? total / double(count) : step;
  std::size_t seg = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double s = std::min(h * double(i), total);
    while (seg + 1 < segments && cum[seg + 1] < s) ++seg;
    const double len = cum[seg + 1] - cum[seg];
    const double t = len > 0.0 ? (s - cum[seg]) / len : 0.0;
    const Point2 a = curve.points[seg];
    const Point2 b = curve.points[(seg + 1) % n];
    out.curve.points.push_back(a + t * (b - a));
    std::size_t src = t < 0.5 ? seg : seg + 1;
    if (src == n) src = 0;
    out.source_index.push_back(src);
  }
  return out;
}

std::string dump_curves(const std::vector<Curve>& curves) {
  std::ostringstream os;
  os.precision(10);
  for (std::size_t i = 0; i < curves.size(); ++i)
    for (const Point2& p : curves[i].points) os << i << ' ' << p.x << ' ' << p.y << '\n';
  return os.str();
}

}  // namespace sca
