#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "sca/contour.hpp"
#include "sca/errors.hpp"
#include "sca/image.hpp"
#include "sca/image_io.hpp"

using namespace sca;

namespace {

GrayImage square_image(int size, int lo, int hi, double bg = 0.0, double fg = 1.0) {
  GrayImage img(size, size, bg);
  for (int y = lo; y <= hi; ++y)
    for (int x = lo; x <= hi; ++x) img.at(x, y) = fg;
  return img;
}

}  // namespace

TEST(GrayImage, RejectsBadData) {
  EXPECT_THROW(GrayImage(2, 2, std::vector<double>(3, 0.0)), DimensionError);
  EXPECT_THROW(GrayImage(1, 1, std::vector<double>{1.5}), ParameterError);
  EXPECT_THROW(GrayImage(1, 1, std::vector<double>{-0.1}), ParameterError);
}

TEST(Grayscale, LuminanceWeights) {
  RgbImage black{GrayImage(3, 2, 0.0), GrayImage(3, 2, 0.0), GrayImage(3, 2, 0.0)};
  const GrayImage g0 = to_grayscale(black);
  for (double v : g0.pixels()) EXPECT_EQ(v, 0.0);
  RgbImage white{GrayImage(3, 2, 1.0), GrayImage(3, 2, 1.0), GrayImage(3, 2, 1.0)};
  const GrayImage g1 = to_grayscale(white);
  for (double v : g1.pixels()) EXPECT_NEAR(v, 1.0, 1e-12);
  RgbImage red{GrayImage(1, 1, 1.0), GrayImage(1, 1, 0.0), GrayImage(1, 1, 0.0)};
  EXPECT_NEAR(to_grayscale(red).at(0, 0), 0.299, 1e-12);
}

TEST(Grayscale, MismatchedChannels) {
  RgbImage bad{GrayImage(2, 2), GrayImage(2, 3), GrayImage(2, 2)};
  EXPECT_THROW(to_grayscale(bad), DimensionError);
}

TEST(Gaussian, KernelMatchesClosedForm) {
  for (double sigma : {0.5, 1.0, 1.4, 3.0}) {
    const auto k = gaussian_kernel(sigma);
    const int half = static_cast<int>(std::ceil(3 * sigma));
    ASSERT_EQ(k.size(), std::size_t(2 * half + 1));
    double z = 0;
    for (int i = -half; i <= half; ++i) z += std::exp(-i * i / (2 * sigma * sigma));
    for (int i = -half; i <= half; ++i) EXPECT_NEAR(k[i + half], std::exp(-i * i / (2 * sigma * sigma)) / z, 1e-15);
  }
}

TEST(Gaussian, RejectsNonPositiveSigma) {
  GrayImage img(4, 4, 0.5);
  EXPECT_THROW(gaussian_smooth(img, 0.0), ParameterError);
  EXPECT_THROW(gaussian_smooth(img, -1.0), ParameterError);
}

TEST(Gaussian, ConstantImageUnchanged) {
  GrayImage img(17, 9, 0.37);
  const GrayImage s = gaussian_smooth(img, 2.0);
  for (double v : s.pixels()) EXPECT_NEAR(v, 0.37, 1e-12);
}

TEST(Gaussian, ImpulseCenterIsCentralWeight) {
  GrayImage img(21, 21, 0.0);
  img.at(10, 10) = 1.0;
  const auto out = gaussian_smooth(img, 1.0);
  // Independent weights: half-width 3, e^{-i^2/2} normalized.
  double z = 0;
  for (int i = -3; i <= 3; ++i) z += std::exp(-i * i / 2.0);
  const double w0 = 1.0 / z;
  EXPECT_NEAR(out.at(10, 10), w0 * w0, 1e-12);
  EXPECT_NEAR(out.at(11, 10), w0 * std::exp(-0.5) / z, 1e-12);
}

TEST(Gaussian, SymmetricInputSymmetricOutput) {
  GrayImage img(15, 15, 0.0);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int y = 0; y < 15; ++y)
    for (int x = 0; x <= 7; ++x) img.at(x, y) = img.at(14 - x, y) = u(rng);
  const auto out = gaussian_smooth(img, 1.3);
  for (int y = 0; y < 15; ++y)
    for (int x = 0; x < 15; ++x) EXPECT_NEAR(out.at(x, y), out.at(14 - x, y), 1e-12);
}

TEST(Gaussian, PreservesInteriorMean) {
  // Periodic-free pattern well inside a constant frame: total mass is kept.
  GrayImage img(64, 64, 0.0);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  double mass = 0;
  for (int y = 20; y < 44; ++y)
    for (int x = 20; x < 44; ++x) mass += img.at(x, y) = u(rng);
  const auto out = gaussian_smooth(img, 1.5);
  double after = 0;
  for (double v : out.pixels()) after += v;
  EXPECT_NEAR(after / (64.0 * 64.0), mass / (64.0 * 64.0), 1e-6);
}

TEST(Canny, RejectsBadThresholds) {
  GrayImage img(8, 8, 0.5);
  EXPECT_THROW(canny(img, {1.4, 0.3, 0.2}), ParameterError);
  EXPECT_THROW(canny(img, {1.4, 0.0, 0.2}), ParameterError);
  EXPECT_THROW(canny(img, {0.0, 0.1, 0.2}), ParameterError);
  EXPECT_THROW(canny(img, {1.4, 0.1, 1.2}), ParameterError);
}

TEST(Canny, ConstantImageHasNoEdges) {
  EXPECT_EQ(canny(GrayImage(32, 32, 0.4)).count(), 0u);
}

TEST(Canny, StepGivesSingleVerticalChain) {
  GrayImage img(40, 30, 0.0);
  for (int y = 0; y < 30; ++y)
    for (int x = 20; x < 40; ++x) img.at(x, y) = 1.0;
  const EdgeMap e = canny(img);
  // Brute force: the largest Sobel response sits on columns 19/20; exactly
  // one of them survives in every row, and always the same one.
  int column = -1;
  for (int y = 0; y < 30; ++y) {
    int n = 0;
    for (int x = 0; x < 40; ++x)
      if (e.test(x, y)) {
        ++n;
        if (column < 0) column = x;
        EXPECT_EQ(x, column);
      }
    EXPECT_EQ(n, 1) << "row " << y;
  }
  EXPECT_TRUE(column == 19 || column == 20);
}

TEST(Canny, EdgePixelsExceedLowThreshold) {
  GrayImage img = square_image(48, 12, 35, 0.1, 0.9);
  const CannyParams p{};
  const EdgeMap e = canny(img, p);
  const auto mag = sobel_magnitude(gaussian_smooth(img, p.sigma));
  const double gmax = *std::max_element(mag.begin(), mag.end());
  for (int y = 0; y < 48; ++y)
    for (int x = 0; x < 48; ++x)
      if (e.test(x, y)) EXPECT_GE(mag[std::size_t(y) * 48 + x], p.low * gmax);
}

TEST(Canny, SquareGivesClosedThinContour) {
  const EdgeMap e = canny(square_image(64, 16, 47));
  ASSERT_GT(e.count(), 0u);
  // One pixel wide: no pixel has more than two neighbours and each has two.
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) {
      if (!e.test(x, y)) continue;
      int n = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) n += (dx || dy) && e.test(x + dx, y + dy);
      EXPECT_EQ(n, 2) << x << "," << y;
      // hugs the square boundary
      const double dx = std::max({16.0 - x, x - 47.0, 0.0});
      const double dy = std::max({16.0 - y, y - 47.0, 0.0});
      const bool near_side = (std::abs(x - 15.5) <= 1 || std::abs(x - 47.5) <= 1 || std::abs(y - 15.5) <= 1 ||
                              std::abs(y - 47.5) <= 1);
      EXPECT_TRUE(near_side || std::hypot(dx, dy) <= 2) << x << "," << y;
    }
  const auto curves = extract_curves(e, 10);
  ASSERT_EQ(curves.size(), 1u);
  EXPECT_TRUE(curves[0].closed);
  EXPECT_EQ(curves[0].size(), e.count());
}

TEST(Canny, ThinnedAcrossEdgeDirection) {
  // Along the (radial) gradient of a disk an edge is one pixel thick: the
  // two neighbors along the quantized gradient are never both edges.
  GrayImage img(60, 60, 0.0);
  for (int y = 0; y < 60; ++y)
    for (int x = 0; x < 60; ++x)
      if (std::hypot(x - 29.5, y - 29.5) < 18) img.at(x, y) = 1.0;
  const EdgeMap e = canny(img);
  ASSERT_GT(e.count(), 50u);
  for (int y = 0; y < 60; ++y)
    for (int x = 0; x < 60; ++x) {
      if (!e.test(x, y)) continue;
      const double t = std::atan2(y - 29.5, x - 29.5);
      const int dx = int(std::lround(std::cos(t))), dy = int(std::lround(std::sin(t)));
      EXPECT_FALSE(e.test(x + dx, y + dy) && e.test(x - dx, y - dy)) << x << "," << y;
    }
  // vertical step: exactly one edge pixel per interior row
  GrayImage step(40, 30, 0.2);
  for (int y = 0; y < 30; ++y)
    for (int x = 20; x < 40; ++x) step.at(x, y) = 0.8;
  const EdgeMap s = canny(step);
  for (int y = 5; y < 25; ++y) {
    int n = 0;
    for (int x = 0; x < 40; ++x) n += s.test(x, y);
    EXPECT_EQ(n, 1) << "row " << y;
  }
}

TEST(ImageIo, PgmRoundTripQuantizes) {
  GrayImage img(5, 3, 0.0);
  for (int i = 0; i < 15; ++i) img.pixels()[i] = i / 14.0;
  const auto path = std::filesystem::temp_directory_path() / "sca_io_roundtrip.pgm";
  write_pgm(path, img);
  const GrayImage back = read_image(path);
  const GrayImage q = quantize_8bit(img);
  ASSERT_EQ(back.width(), 5);
  ASSERT_EQ(back.height(), 3);
  for (std::size_t i = 0; i < 15; ++i) EXPECT_NEAR(back.pixels()[i], q.pixels()[i], 1e-12);
  std::filesystem::remove(path);
}

TEST(ImageIo, MissingFileThrows) {
  EXPECT_THROW(read_image("/nonexistent/sca.pgm"), IoError);
}
