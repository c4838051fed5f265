#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sca {

/// Row-major grayscale raster with intensities in [0, 1].
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, double fill = 0.0);
  /// Takes ownership of `data`; throws DimensionError on a size mismatch and
  /// ParameterError when a value lies outside [0, 1].
  GrayImage(int width, int height, std::vector<double> data);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }
  std::size_t size() const { return data_.size(); }

  double at(int x, int y) const { return data_[index(x, y)]; }
  double& at(int x, int y) { return data_[index(x, y)]; }
  /// Edge-replicated access: coordinates are clamped into the raster.
  double clamped(int x, int y) const;

  std::span<const double> pixels() const { return data_; }
  std::span<double> pixels() { return data_; }

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

/// Three separate channel planes, each in [0, 1].
struct RgbImage {
  GrayImage r;
  GrayImage g;
  GrayImage b;
};

/// Binary edge mask with the dimensions of its source image.
class EdgeMap {
 public:
  EdgeMap() = default;
  EdgeMap(int width, int height) : width_(width), height_(height), mask_(std::size_t(width) * height, 0) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool inside(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
  /// Out-of-raster coordinates read as non-edge.
  bool test(int x, int y) const { return inside(x, y) && mask_[std::size_t(y) * width_ + x] != 0; }
  void set(int x, int y, bool on = true) { mask_[std::size_t(y) * width_ + x] = on ? 1 : 0; }
  std::size_t count() const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<unsigned char> mask_;
};

struct CannyParams {
  double sigma = 1.4;
  double low = 0.1;   // fraction of the maximum gradient magnitude
  double high = 0.2;  // fraction of the maximum gradient magnitude
};

GrayImage to_grayscale(const RgbImage& rgb);

/// Normalized discrete Gaussian with half-width ceil(3 * sigma).
std::vector<double> gaussian_kernel(double sigma);

/// Separable Gaussian blur with edge replication at the borders.
GrayImage gaussian_smooth(const GrayImage& img, double sigma);

/// 3x3 Sobel gradient magnitude (row-major) with edge replication. The
/// optional outputs receive the x and y derivatives.
std::vector<double> sobel_magnitude(const GrayImage& img, std::vector<double>* gx = nullptr,
                                    std::vector<double>* gy = nullptr);

/// Smoothing, Sobel gradient, non-maximum suppression along the quantized
/// gradient direction, hysteresis at low*Gmax / high*Gmax, and a final pass
/// that removes staircase pixels so every chain is one pixel wide.
EdgeMap canny(const GrayImage& img, const CannyParams& params = {});

}  // namespace sca
