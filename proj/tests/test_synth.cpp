#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "sca/errors.hpp"
#include "sca/synth.hpp"
#include "sca/transforms.hpp"

using namespace sca;

TEST(Synth, SquareVerticesAreAnalytic) {
  const SynthFixture f = make_polygon(4, 60, 0);
  ASSERT_EQ(f.true_corners.size(), 4u);
  const Point2 c{99.5, 99.5};
  const std::vector<Point2> expect{{c.x, c.y - 60}, {c.x + 60, c.y}, {c.x, c.y + 60}, {c.x - 60, c.y}};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(f.true_corners[i].x, expect[i].x, 1e-9);
    EXPECT_NEAR(f.true_corners[i].y, expect[i].y, 1e-9);
    EXPECT_NEAR(f.corner_angles[i], 90.0, 1e-9);
  }
}

TEST(Synth, TriangleIsEquilateral) {
  const SynthFixture f = make_polygon(3, 70, 17);
  const auto& v = f.true_corners;
  const double a = distance(v[0], v[1]), b = distance(v[1], v[2]), c = distance(v[2], v[0]);
  EXPECT_NEAR(a, b, 1.0);
  EXPECT_NEAR(b, c, 1.0);
}

TEST(Synth, DodecagonAnglesBelowThreshold) {
  const SynthFixture f = make_polygon(12, 40, 0);
  ASSERT_EQ(f.true_corners.size(), 12u);
  for (double a : f.corner_angles) {
    EXPECT_NEAR(a, (12 - 2) * 180.0 / 12, 1e-9);
    EXPECT_LT(a, 157.0);
  }
}

TEST(Synth, StarCornersAndAngles) {
  const SynthFixture f = make_star(5, 60, 25);
  ASSERT_EQ(f.true_corners.size(), 10u);
  for (std::size_t i = 0; i < 10; i += 2) EXPECT_LT(f.corner_angles[i], f.corner_angles[i + 1]);
}

TEST(Synth, StarApproachesRegularPolygon) {
  const SynthFixture s = make_star(5, 60, 60 - 1e-9);
  const SynthFixture p = make_polygon(10, 60, 0);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(distance(s.true_corners[i], p.true_corners[i]), 0.0, 1e-6);
}

TEST(Synth, BlobsHaveNoCornersAndAreSeeded) {
  EXPECT_TRUE(make_blob(60, 0, 1).true_corners.empty());
  EXPECT_TRUE(make_blob(40, 0, 1, 2.0).true_corners.empty());
  const SynthFixture a = make_blob(60, 8, 42), b = make_blob(60, 8, 42), c = make_blob(60, 8, 43);
  EXPECT_TRUE(std::equal(a.image.pixels().begin(), a.image.pixels().end(), b.image.pixels().begin()));
  EXPECT_FALSE(std::equal(a.image.pixels().begin(), a.image.pixels().end(), c.image.pixels().begin()));
}

TEST(Synth, RejectsUnfitShapes) {
  EXPECT_THROW(make_polygon(2, 50, 0), ParameterError);
  EXPECT_THROW(make_polygon(4, 120, 0), ParameterError);
  EXPECT_THROW(make_polygon(4, 5, 0), ParameterError);
  EXPECT_THROW(make_star(5, 20, 30), ParameterError);
}

TEST(Synth, AntiAliasedEdges) {
  const SynthFixture f = make_polygon(5, 70, 0);
  std::size_t mixed = 0;
  for (double v : f.image.pixels())
    if (v > 0.1 + 1e-9 && v < 0.9 - 1e-9) ++mixed;
  EXPECT_GT(mixed, 100u);
}

TEST(Synth, CorpusShape) {
  const auto corpus = make_corpus();
  ASSERT_EQ(corpus.size(), 23u);
  std::set<std::string> ids;
  std::set<ShapeKind> kinds;
  for (const auto& f : corpus) {
    ids.insert(f.id);
    kinds.insert(f.kind);
    EXPECT_EQ(f.true_corners.size(), f.corner_angles.size());
    if (f.kind == ShapeKind::BlobNoCorners) EXPECT_TRUE(f.true_corners.empty());
  }
  EXPECT_EQ(ids.size(), 23u);
  EXPECT_EQ(kinds.size(), 4u);
  const auto again = make_corpus();
  for (std::size_t i = 0; i < corpus.size(); ++i)
    EXPECT_TRUE(std::equal(corpus[i].image.pixels().begin(), corpus[i].image.pixels().end(),
                           again[i].image.pixels().begin()));
}

TEST(Synth, MappedCornersStayOnCanvas) {
  const auto corpus = make_corpus();
  for (Family fam : all_families()) {
    for (const TransformSpec& s : enumerate_specs(fam)) {
      if (!s.geometric()) continue;
      const WarpGeometry g = warp_geometry(s, 200, 200);
      for (const auto& f : corpus)
        for (const Point2& p : f.true_corners) {
          const Point2 q = map_point(s, 200, 200, p);
          ASSERT_TRUE(q.x >= 0 && q.y >= 0 && q.x <= g.width - 1 && q.y <= g.height - 1)
              << f.id << " " << s.label();
        }
    }
  }
}
