#include "sca/image.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "sca/errors.hpp"

namespace sca {

GrayImage::GrayImage(int width, int height, double fill)
    : width_(width), height_(height), data_(std::size_t(std::max(width, 0)) * std::max(height, 0), fill) {
  if (width < 0 || height < 0) throw DimensionError("negative image dimensions");
  if (!(fill >= 0.0 && fill <= 1.0)) throw ParameterError("fill intensity outside [0,1]");
}

GrayImage::GrayImage(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width < 0 || height < 0) throw DimensionError("negative image dimensions");
  if (data_.size() != std::size_t(width) * std::size_t(height))
    throw DimensionError("pixel buffer length " + std::to_string(data_.size()) + " != " +
                         std::to_string(width) + "x" + std::to_string(height));
  for (double v : data_)
    if (!(v >= 0.0 && v <= 1.0)) throw ParameterError("intensity outside [0,1]");
}

double GrayImage::clamped(int x, int y) const {
  x = std::clamp(x, 0, width_ - 1);
  y = std::clamp(y, 0, height_ - 1);
  return data_[index(x, y)];
}

std::size_t EdgeMap::count() const {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), 1));
}

GrayImage to_grayscale(const RgbImage& rgb) {
  const int w = rgb.r.width();
  const int h = rgb.r.height();
  if (rgb.g.width() != w || rgb.g.height() != h || rgb.b.width() != w || rgb.b.height() != h)
    throw DimensionError("RGB channels differ in size");
  GrayImage out(w, h);
  auto r = rgb.r.pixels();
  auto g = rgb.g.pixels();
  auto b = rgb.b.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < dst.size(); ++i)
    dst[i] = std::clamp(0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i], 0.0, 1.0);
  return out;
}

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) throw ParameterError("gaussian sigma must be positive");
  const int half = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * half + 1);
  double sum = 0.0;
  for (int i = -half; i <= half; ++i) {
    k[i + half] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    sum += k[i + half];
  }
  for (double& v : k) v /= sum;
  return k;
}

GrayImage gaussian_smooth(const GrayImage& img, double sigma) {
  const std::vector<double> k = gaussian_kernel(sigma);
  const int half = static_cast<int>(k.size() / 2);
  const int w = img.width();
  const int h = img.height();
  if (img.empty()) return img;

  std::vector<double> tmp(img.size());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -half; i <= half; ++i) acc += k[i + half] * img.clamped(x + i, y);
      tmp[std::size_t(y) * w + x] = acc;
    }

  std::vector<double> out(img.size());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -half; i <= half; ++i) {
        const int yy = std::clamp(y + i, 0, h - 1);
        acc += k[i + half] * tmp[std::size_t(yy) * w + x];
      }
      out[std::size_t(y) * w + x] = std::clamp(acc, 0.0, 1.0);
    }
  return GrayImage(w, h, std::move(out));
}

std::vector<double> sobel_magnitude(const GrayImage& img, std::vector<double>* gx_out,
                                    std::vector<double>* gy_out) {
  const int w = img.width();
  const int h = img.height();
  std::vector<double> mag(img.size()), gx(img.size()), gy(img.size());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      auto p = [&](int dx, int dy) { return img.clamped(x + dx, y + dy); };
      const double dx = (p(1, -1) + 2 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2 * p(-1, 0) + p(-1, 1));
      const double dy = (p(-1, 1) + 2 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2 * p(0, -1) + p(1, -1));
      const std::size_t i = std::size_t(y) * w + x;
      gx[i] = dx;
      gy[i] = dy;
      mag[i] = std::hypot(dx, dy);
    }
  if (gx_out) *gx_out = std::move(gx);
  if (gy_out) *gy_out = std::move(gy);
  return mag;
}

namespace {

// Removes the inner pixel of every staircase step: a pixel whose only two
// neighbors are orthogonal 4-neighbors is redundant for 8-connectivity.
void remove_staircase_pixels(EdgeMap& edges) {
  static constexpr int kDx[8] = {0, 1, 1, 1, 0, -1, -1, -1};
  static constexpr int kDy[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
  bool changed = true;
  while (changed) {
    changed = false;
    for (int y = 0; y < edges.height(); ++y)
      for (int x = 0; x < edges.width(); ++x) {
        if (!edges.test(x, y)) continue;
        int n = 0;
        bool on[8];
        for (int d = 0; d < 8; ++d) {
          on[d] = edges.test(x + kDx[d], y + kDy[d]);
          n += on[d];
        }
        if (n != 2) continue;
        // ring order N, NE, E, SE, S, SW, W, NW: 4-neighbors at even slots
        const bool elbow = (on[0] && on[2]) || (on[2] && on[4]) || (on[4] && on[6]) || (on[6] && on[0]);
        if (elbow) {
          edges.set(x, y, false);
          changed = true;
        }
      }
  }
}

}  // namespace

EdgeMap canny(const GrayImage& img, const CannyParams& params) {
  if (!(params.sigma > 0.0)) throw ParameterError("canny sigma must be positive");
  if (!(params.low > 0.0 && params.low < params.high && params.high <= 1.0))
    throw ParameterError("canny thresholds must satisfy 0 < low < high <= 1");

  const int w = img.width();
  const int h = img.height();
  EdgeMap edges(w, h);
  if (img.empty()) return edges;

  const GrayImage smooth = gaussian_smooth(img, params.sigma);
  std::vector<double> gx, gy;
  const std::vector<double> mag = sobel_magnitude(smooth, &gx, &gy);
  const double gmax = *std::max_element(mag.begin(), mag.end());
  if (gmax <= 1e-12) return edges;

  auto mag_at = [&](int x, int y) {
    x = std::clamp(x, 0, w - 1);
    y = std::clamp(y, 0, h - 1);
    return mag[std::size_t(y) * w + x];
  };

  // Non-maximum suppression. Ties are broken toward the positive side so a
  // symmetric ridge keeps exactly one pixel.
  std::vector<unsigned char> nms(img.size(), 0);
  const double low = params.low * gmax;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const std::size_t i = std::size_t(y) * w + x;
      const double m = mag[i];
      if (m < low || m <= 0.0) continue;
      double angle = std::atan2(gy[i], gx[i]) * 180.0 / M_PI;
      if (angle < 0) angle += 180.0;
      int ox = 1, oy = 0;
      if (angle >= 22.5 && angle < 67.5) {
        ox = 1; oy = 1;
      } else if (angle >= 67.5 && angle < 112.5) {
        ox = 0; oy = 1;
      } else if (angle >= 112.5 && angle < 157.5) {
        ox = -1; oy = 1;
      }
      if (m >= mag_at(x - ox, y - oy) && m > mag_at(x + ox, y + oy)) nms[i] = 1;
    }

  // Hysteresis from strong seeds through 8-connected weak pixels.
  const double high = params.high * gmax;
  std::deque<std::pair<int, int>> queue;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const std::size_t i = std::size_t(y) * w + x;
      if (nms[i] && mag[i] >= high) {
        edges.set(x, y);
        queue.emplace_back(x, y);
      }
    }
  while (!queue.empty()) {
    auto [x, y] = queue.front();
    queue.pop_front();
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = x + dx, ny = y + dy;
        if (!edges.inside(nx, ny) || edges.test(nx, ny)) continue;
        if (!nms[std::size_t(ny) * w + nx]) continue;
        edges.set(nx, ny);
        queue.emplace_back(nx, ny);
      }
  }

  remove_staircase_pixels(edges);
  return edges;
}

}  // namespace sca
