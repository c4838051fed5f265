#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "sca/errors.hpp"
#include "sca/synth.hpp"
#include "sca/transforms.hpp"

using namespace sca;

namespace {

double psnr(const GrayImage& a, const GrayImage& b) {
  double mse = 0;
  for (std::size_t i = 0; i < a.size(); ++i) mse += std::pow(a.pixels()[i] - b.pixels()[i], 2);
  mse /= double(a.size());
  return mse == 0 ? 1e9 : 10 * std::log10(1.0 / mse);
}

GrayImage random_image(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  GrayImage img(w, h);
  for (double& v : img.pixels()) v = u(rng);
  return img;
}

}  // namespace

TEST(Enumerate, FamilyCounts) {
  const std::vector<std::pair<Family, std::size_t>> expect = {
      {Family::Scaling, 15},         {Family::Shearing, 48},       {Family::Rotation, 18},
      {Family::RotationScale, 175},  {Family::NonuniformScale, 77}, {Family::JpegCompression, 20},
      {Family::GaussianNoise, 10}};
  for (auto [f, n] : expect) EXPECT_EQ(enumerate_specs(f).size(), n) << to_string(f);
  EXPECT_EQ(enumerate_specs(Family::Scaling).size() * 23, 345u);
  EXPECT_EQ(enumerate_specs(Family::RotationScale).size() * 23, 4025u);
  EXPECT_EQ(enumerate_specs(Family::JpegCompression).size() * 23, 460u);
  EXPECT_EQ(enumerate_specs(Family::GaussianNoise).size() * 23, 230u);
}

TEST(Enumerate, PublishedCountsKeptAsMetadata) {
  EXPECT_EQ(published_count(Family::Shearing), 1081);
  EXPECT_EQ(published_count(Family::Rotation), 437);
  EXPECT_EQ(published_count(Family::NonuniformScale), 1772);
  EXPECT_EQ(published_count(Family::Scaling), 345);
}

TEST(Enumerate, ParameterRanges) {
  for (const auto& s : enumerate_specs(Family::Scaling)) {
    EXPECT_EQ(s.sx, s.sy);
    EXPECT_GE(s.sx, 0.5 - 1e-12);
    EXPECT_LE(s.sx, 2.0 + 1e-12);
    EXPECT_GT(std::abs(s.sx - 1.0), 0.05);
  }
  for (const auto& s : enumerate_specs(Family::Rotation)) {
    EXPECT_NE(s.theta_deg, 0.0);
    EXPECT_LE(std::abs(s.theta_deg), 90.0);
  }
  for (const auto& s : enumerate_specs(Family::Shearing)) {
    EXPECT_FALSE(s.shx == 0 && s.shy == 0);
    EXPECT_LE(s.shx, 0.012 + 1e-12);
  }
  for (const auto& s : enumerate_specs(Family::NonuniformScale)) {
    EXPECT_GE(s.sx, 0.7 - 1e-12);
    EXPECT_LE(s.sy, 1.5 + 1e-12);
  }
  const auto q = enumerate_specs(Family::JpegCompression);
  EXPECT_EQ(q.front().quality, 5);
  EXPECT_EQ(q.back().quality, 100);
  const auto v = enumerate_specs(Family::GaussianNoise);
  EXPECT_DOUBLE_EQ(v.front().variance, 0.005);
  EXPECT_DOUBLE_EQ(v.back().variance, 0.05);
  for (Family f : all_families())
    for (const auto& s : enumerate_specs(f))
      EXPECT_EQ(s.geometric(), f != Family::JpegCompression && f != Family::GaussianNoise);
}

TEST(Enumerate, LabelsUnique) {
  for (Family f : all_families()) {
    std::set<std::string> labels;
    for (const auto& s : enumerate_specs(f)) labels.insert(s.label());
    EXPECT_EQ(labels.size(), enumerate_specs(f).size());
  }
}

TEST(FamilyNames, RoundTrip) {
  for (Family f : all_families()) EXPECT_EQ(family_from_string(to_string(f)), f);
  EXPECT_EQ(family_from_string("jpeg"), Family::JpegCompression);
  EXPECT_EQ(family_from_string("NOISE"), Family::GaussianNoise);
  EXPECT_THROW(family_from_string("blur"), ParameterError);
}

TEST(Warp, IdentityIsPixelIdentical) {
  const GrayImage img = random_image(37, 23, 1);
  TransformSpec id;  // Scaling with s = 1
  const GrayImage out = apply_geometric(img, id);
  ASSERT_EQ(out.width(), 37);
  ASSERT_EQ(out.height(), 23);
  for (std::size_t i = 0; i < img.size(); ++i) EXPECT_EQ(out.pixels()[i], img.pixels()[i]);
}

TEST(Warp, DoubleScaleDoublesCanvas) {
  TransformSpec s;
  s.sx = s.sy = 2.0;
  const GrayImage out = apply_geometric(random_image(40, 30, 2), s);
  EXPECT_NEAR(out.width(), 80, 1);
  EXPECT_NEAR(out.height(), 60, 1);
}

TEST(Warp, QuarterTurnPermutesPixels) {
  const GrayImage img = random_image(13, 7, 3);
  TransformSpec r;
  r.family = Family::Rotation;
  r.theta_deg = 90;
  const GrayImage out = apply_geometric(img, r);
  ASSERT_EQ(out.width(), 7);
  ASSERT_EQ(out.height(), 13);
  // analytic: (x, y) -> (h - 1 - y, x)
  for (int y = 0; y < 7; ++y)
    for (int x = 0; x < 13; ++x) EXPECT_NEAR(out.at(7 - 1 - y, x), img.at(x, y), 1e-12);
  const Point2 q = map_point(r, 13, 7, {4, 2});
  EXPECT_NEAR(q.x, 7 - 1 - 2, 1e-12);
  EXPECT_NEAR(q.y, 4, 1e-12);
}

TEST(Warp, NonGeometricSpecRejected) {
  TransformSpec j;
  j.family = Family::JpegCompression;
  EXPECT_THROW(apply_geometric(GrayImage(8, 8), j), ParameterError);
}

TEST(MapPoint, IdentityAndLinearPart) {
  TransformSpec id;
  EXPECT_EQ(map_point(id, 50, 40, {3.5, 7.25}), (Point2{3.5, 7.25}));
  TransformSpec j;
  j.family = Family::GaussianNoise;
  j.variance = 0.01;
  EXPECT_EQ(map_point(j, 50, 40, {3.5, 7.25}), (Point2{3.5, 7.25}));
  TransformSpec s;
  s.sx = s.sy = 2;
  EXPECT_EQ(linear_part(s).apply({10, 10}), (Point2{20, 20}));
}

TEST(MapPoint, RotationInverseComposition) {
  for (double t : {10.0, -30.0, 47.0, 90.0}) {
    TransformSpec fwd;
    fwd.family = Family::Rotation;
    fwd.theta_deg = t;
    TransformSpec back = fwd;
    back.theta_deg = -t;
    const int w = 60, h = 40;
    const WarpGeometry g1 = warp_geometry(fwd, w, h);
    const WarpGeometry g2 = warp_geometry(back, g1.width, g1.height);
    const Point2 p{12.3, 31.7};
    const Point2 r = map_point(back, g1.width, g1.height, map_point(fwd, w, h, p));
    // equal up to the shift between the two canvas centers
    const Point2 c1{(w - 1) / 2.0, (h - 1) / 2.0}, c3{(g2.width - 1) / 2.0, (g2.height - 1) / 2.0};
    EXPECT_NEAR(r.x - c3.x, p.x - c1.x, 1e-9);
    EXPECT_NEAR(r.y - c3.y, p.y - c1.y, 1e-9);
  }
}

TEST(MapPoint, AgreesWithWarpedContent) {
  // A bright dot moves where map_point says it goes.
  GrayImage img(64, 48, 0.0);
  for (int dy = -2; dy <= 2; ++dy)
    for (int dx = -2; dx <= 2; ++dx) img.at(20 + dx, 15 + dy) = 1.0;
  TransformSpec s;
  s.family = Family::RotationScale;
  s.theta_deg = 30;
  s.sx = 1.2;
  s.sy = 0.8;
  const GrayImage out = apply_geometric(img, s);
  double sx = 0, sy = 0, m = 0;
  for (int y = 0; y < out.height(); ++y)
    for (int x = 0; x < out.width(); ++x) {
      sx += x * out.at(x, y);
      sy += y * out.at(x, y);
      m += out.at(x, y);
    }
  const Point2 q = map_point(s, 64, 48, {20, 15});
  EXPECT_NEAR(sx / m, q.x, 0.3);
  EXPECT_NEAR(sy / m, q.y, 0.3);
}

TEST(Warp, AffineRoundTripInterior) {
  const SynthFixture f = make_star(5, 60, 28);
  for (const TransformSpec& s : {enumerate_specs(Family::RotationScale)[60], enumerate_specs(Family::Shearing)[20],
                                 enumerate_specs(Family::NonuniformScale)[30], enumerate_specs(Family::Rotation)[4]}) {
    const WarpGeometry g = warp_geometry(s, 200, 200);
    const GrayImage there = warp_affine(f.image, g.forward, g.width, g.height);
    const GrayImage back = warp_affine(there, g.forward.inverse(), 200, 200);
    double err = 0;
    std::size_t n = 0;
    for (int y = 20; y < 180; ++y)
      for (int x = 20; x < 180; ++x) {
        err += std::abs(back.at(x, y) - f.image.at(x, y));
        ++n;
      }
    EXPECT_LT(err / double(n), 0.02) << s.label();
  }
}

TEST(Jpeg, QuantTable) {
  const auto q50 = jpeg_quant_table(50);
  EXPECT_EQ(q50[0], 16);
  EXPECT_EQ(q50[63], 99);
  for (int v : jpeg_quant_table(100)) EXPECT_EQ(v, 1);
  const auto q10 = jpeg_quant_table(10);  // scale 500
  EXPECT_EQ(q10[0], (16 * 500 + 50) / 100);
  for (int v : jpeg_quant_table(1)) EXPECT_LE(v, 255);
  EXPECT_THROW(jpeg_quant_table(0), ParameterError);
  EXPECT_THROW(jpeg_degrade(GrayImage(8, 8), 101), ParameterError);
}

TEST(Jpeg, QualityHundredIsNearLossless) {
  const SynthFixture f = make_polygon(6, 70, 10);
  const GrayImage out = jpeg_degrade(f.image, 100);
  EXPECT_EQ(out.width(), f.image.width());
  EXPECT_GT(psnr(out, f.image), 50.0);
}

TEST(Jpeg, ConstantImageStaysConstant) {
  // Only the DC term is non-zero; its rounding error is at most half a
  // quantization step, which the orthonormal 8x8 DCT spreads as step/16.
  for (int q : {5, 35, 75, 100}) {
    const GrayImage out = jpeg_degrade(GrayImage(30, 21, 0.4123), q);
    const double bound = (jpeg_quant_table(q)[0] / 16.0 + 1.0) / 255.0;
    for (double v : out.pixels()) {
      EXPECT_DOUBLE_EQ(v, out.pixels()[0]);
      EXPECT_NEAR(v, 0.4123, bound) << "q " << q;
    }
  }
}

TEST(Jpeg, LowQualityCreatesBlockArtifacts) {
  GrayImage img(64, 64, 0.2);
  for (int y = 0; y < 64; ++y)
    for (int x = 37; x < 64; ++x) img.at(x, y) = 0.8;  // step inside block column 4
  const GrayImage out = jpeg_degrade(img, 5);
  // the block holding the step, formerly flat on its left part, now varies there
  double mean = 0, var = 0;
  for (int y = 8; y < 16; ++y)
    for (int x = 32; x < 36; ++x) mean += out.at(x, y) / 32.0;
  for (int y = 8; y < 16; ++y)
    for (int x = 32; x < 36; ++x) var += std::pow(out.at(x, y) - mean, 2) / 32.0;
  EXPECT_GT(var, 1e-5);
  EXPECT_GT(std::abs(mean - 0.2), 0.005);
}

TEST(Noise, TinyVarianceLeavesImage) {
  const GrayImage img = random_image(40, 40, 4);
  const GrayImage out = add_gaussian_noise(img, 1e-12, 9);
  for (std::size_t i = 0; i < img.size(); ++i) EXPECT_NEAR(out.pixels()[i], img.pixels()[i], 1e-5);
}

TEST(Noise, SampleVarianceMatches) {
  const GrayImage img(256, 256, 0.5);
  const GrayImage out = add_gaussian_noise(img, 0.01, 12345);
  double mean = 0, var = 0;
  for (std::size_t i = 0; i < img.size(); ++i) mean += out.pixels()[i] - 0.5;
  mean /= double(img.size());
  for (std::size_t i = 0; i < img.size(); ++i) var += std::pow(out.pixels()[i] - 0.5 - mean, 2);
  var /= double(img.size() - 1);
  EXPECT_NEAR(var, 0.01, 0.001);
}

TEST(Noise, SeededDeterminism) {
  const GrayImage img(32, 32, 0.5);
  const GrayImage a = add_gaussian_noise(img, 0.02, 77), b = add_gaussian_noise(img, 0.02, 77),
                  c = add_gaussian_noise(img, 0.02, 78);
  EXPECT_TRUE(std::equal(a.pixels().begin(), a.pixels().end(), b.pixels().begin()));
  EXPECT_FALSE(std::equal(a.pixels().begin(), a.pixels().end(), c.pixels().begin()));
  EXPECT_THROW(add_gaussian_noise(img, 0.0, 1), ParameterError);
}

TEST(Seeds, DerivedFromImageAndSpec) {
  const auto specs = enumerate_specs(Family::GaussianNoise);
  EXPECT_EQ(derive_seed(7, "a", specs[0]), derive_seed(7, "a", specs[0]));
  EXPECT_NE(derive_seed(7, "a", specs[0]), derive_seed(7, "b", specs[0]));
  EXPECT_NE(derive_seed(7, "a", specs[0]), derive_seed(7, "a", specs[1]));
  EXPECT_NE(derive_seed(7, "a", specs[0]), derive_seed(8, "a", specs[0]));
}

TEST(Manifest, RoundTrip) {
  std::vector<ManifestRow> rows;
  for (Family f : all_families()) {
    TransformSpec s = enumerate_specs(f)[3];
    s.seed = derive_seed(1, "img", s);
    rows.push_back({"img", "bases/img.pgm", s, "images/img/" + s.label() + ".pgm"});
  }
  std::stringstream ss;
  write_manifest(ss, rows);
  const auto back = read_manifest(ss, "/data");
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].image_id, "img");
    EXPECT_EQ(back[i].base_path, std::filesystem::path("/data/bases/img.pgm"));
    EXPECT_EQ(back[i].spec.family, rows[i].spec.family);
    EXPECT_EQ(back[i].spec.label(), rows[i].spec.label());
    EXPECT_EQ(back[i].spec.sx, rows[i].spec.sx);
    EXPECT_EQ(back[i].spec.variance, rows[i].spec.variance);
    EXPECT_EQ(back[i].spec.seed, rows[i].spec.seed);
  }
}

TEST(Manifest, MalformedRowThrows) {
  std::stringstream ss("a,b,Scaling,1\n");
  EXPECT_THROW(read_manifest(ss), IoError);
  std::stringstream bad("a,b,Blur,1,1,0,0,0,100,0,0,x.pgm\n");
  EXPECT_THROW(read_manifest(bad), IoError);
}
