#include "mppi/scene.h"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

namespace mppi {
namespace {

ObstacleTrack Box(double x, double y, double yaw, double length, double width) {
  ObstacleTrack t;
  t.footprint = {{x, y}, yaw, length, width};
  return t;
}

TEST(DecomposeTest, SquareGetsCircumscribedCircle) {
  const auto c = Decompose(Box(1.0, -2.0, 0.4, 2.0, 2.0), 0.0);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_NEAR(c[0].cx, 1.0, 1e-15);
  EXPECT_NEAR(c[0].cy, -2.0, 1e-15);
  EXPECT_NEAR(c[0].radius, std::sqrt(2.0), 1e-15);
}

TEST(DecomposeTest, CarGetsThreeCircles) {
  const double yaw = 0.3;
  const auto c = Decompose(Box(10.0, 5.0, yaw, 4.5, 1.8), 0.0);
  ASSERT_EQ(c.size(), 3u);
  const double offsets[] = {-1.5, 0.0, 1.5};
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(c[i].radius, 1.1715374513859982, 1e-12);
    EXPECT_NEAR(c[i].cx, 10.0 + offsets[i] * std::cos(yaw), 1e-12);
    EXPECT_NEAR(c[i].cy, 5.0 + offsets[i] * std::sin(yaw), 1e-12);
  }
}

TEST(DecomposeTest, MarginAddsToRadius) {
  const auto plain = Decompose(Box(0, 0, 0, 4.5, 1.8), 0.0);
  const auto inflated = Decompose(Box(0, 0, 0, 4.5, 1.8), 0.35);
  ASSERT_EQ(inflated.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(inflated[i].radius, 1.5215374513859983, 1e-12);
    EXPECT_EQ(inflated[i].cx, plain[i].cx);
    EXPECT_EQ(inflated[i].cy, plain[i].cy);
  }
}

TEST(DecomposeTest, RejectsBadFootprints) {
  EXPECT_THROW(Decompose(Box(0, 0, 0, 0.0, 1.0), 0.0), std::invalid_argument);
  EXPECT_THROW(Decompose(Box(0, 0, 0, 2.0, -1.0), 0.0), std::invalid_argument);
  EXPECT_THROW(Decompose(Box(0, 0, 0, 1.0, 2.0), 0.0), std::invalid_argument);
  EXPECT_THROW(Decompose(Box(0, 0, 0, 2.0, 1.0), -0.1), std::invalid_argument);
}

bool Covered(double px, double py, const std::vector<CircleObstacle>& circles) {
  for (const CircleObstacle& c : circles) {
    if (std::hypot(px - c.cx, py - c.cy) <= c.radius) return true;
  }
  return false;
}

TEST(DecomposeTest, CoversRandomRectangles) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> width(0.2, 3.0);
  std::uniform_real_distribution<double> aspect(1.0, 6.0);
  std::uniform_real_distribution<double> pos(-50.0, 50.0);
  std::uniform_real_distribution<double> yaw(-3.14159, 3.14159);
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  for (int r = 0; r < 20; ++r) {
    const double w = width(rng);
    const ObstacleTrack box = Box(pos(rng), pos(rng), yaw(rng), w * aspect(rng), w);
    const auto circles = Decompose(box, 0.0);
    const Footprint& f = box.footprint;
    const double cs = std::cos(f.yaw), sn = std::sin(f.yaw);
    for (int k = 0; k < 10000; ++k) {
      const double u = unit(rng) * f.length;
      const double v = unit(rng) * f.width;
      ASSERT_TRUE(Covered(f.center.x + u * cs - v * sn,
                          f.center.y + u * sn + v * cs, circles));
    }
    // Corners are the hardest points.
    for (double su : {-0.5, 0.5}) {
      for (double sv : {-0.5, 0.5}) {
        const double u = su * f.length * (1 - 1e-12);
        const double v = sv * f.width * (1 - 1e-12);
        EXPECT_TRUE(Covered(f.center.x + u * cs - v * sn,
                            f.center.y + u * sn + v * cs, circles));
      }
    }
  }
}

TEST(DecomposeTest, MarginIsMonotone) {
  const ObstacleTrack box = Box(0, 0, 0.2, 5.0, 2.0);
  double previous = 0.0;
  for (double m : {0.0, 0.1, 0.5, 2.0}) {
    const auto c = Decompose(box, m);
    EXPECT_GE(c[0].radius, previous);
    previous = c[0].radius;
  }
}

TEST(PredictTest, StaticTrackUnchanged) {
  ObstacleTrack t = Box(3, 4, 0.5, 4.5, 1.8);
  t.velocity = {5.0, 5.0};  // ignored for static tracks
  EXPECT_EQ(Predict(t, 7.5), Decompose(t, 0.0));
}

TEST(PredictTest, ConstantVelocity) {
  ObstacleTrack t = Box(3, 4, 0.0, 4.5, 1.8);
  t.kind = ObstacleKind::kMoving;
  t.velocity = {2.0, 0.0};
  const auto base = Decompose(t, 0.0);
  const auto moved = Predict(t, 1.5);
  for (std::size_t i = 0; i < base.size(); ++i) {
    EXPECT_NEAR(moved[i].cx, base[i].cx + 3.0, 1e-12);
    EXPECT_NEAR(moved[i].cy, base[i].cy, 1e-12);
    EXPECT_EQ(moved[i].radius, base[i].radius);
  }
  t.velocity = {1.0, 1.0};
  const auto diagonal = Predict(t, 0.25);
  for (std::size_t i = 0; i < base.size(); ++i) {
    EXPECT_NEAR(diagonal[i].cx, base[i].cx + 0.25, 1e-12);
    EXPECT_NEAR(diagonal[i].cy, base[i].cy + 0.25, 1e-12);
  }
}

TEST(PredictTest, Additive) {
  ObstacleTrack t = Box(-1, 2, 1.0, 3.0, 1.5);
  t.kind = ObstacleKind::kMoving;
  t.velocity = {0.7, -1.3};
  const auto whole = Predict(t, 2.5);
  const auto split = Predict(Advance(t, 1.0), 1.5);
  for (std::size_t i = 0; i < whole.size(); ++i) {
    EXPECT_NEAR(whole[i].cx, split[i].cx, 1e-12);
    EXPECT_NEAR(whole[i].cy, split[i].cy, 1e-12);
  }
}

TEST(MinObstacleDistanceTest, Examples) {
  const std::vector<CircleObstacle> one{{5, 0, 1}};
  EXPECT_EQ(MinObstacleDistance({0, 0}, one), 4.0);
  const std::vector<CircleObstacle> inside{{0.5, 0, 1}};
  EXPECT_EQ(MinObstacleDistance({0, 0}, inside), -0.5);
  EXPECT_EQ(MinObstacleDistance({0, 0}, {}),
            std::numeric_limits<double>::infinity());
}

TEST(MinObstacleDistanceTest, MatchesExhaustiveMin) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> pos(-20, 20);
  std::uniform_real_distribution<double> rad(0.1, 3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<CircleObstacle> circles;
    for (int k = 0; k < 10; ++k) circles.push_back({pos(rng), pos(rng), rad(rng)});
    const Vec2 p{pos(rng), pos(rng)};
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : circles) {
      best = std::min(best, std::hypot(p.x - c.cx, p.y - c.cy) - c.radius);
    }
    EXPECT_NEAR(MinObstacleDistance(p, circles), best, 1e-12);
    // 1-Lipschitz in p.
    const Vec2 q{p.x + 0.3, p.y - 0.4};
    EXPECT_LE(std::abs(MinObstacleDistance(q, circles) -
                       MinObstacleDistance(p, circles)),
              0.5 + 1e-12);
  }
}

ReferencePath Path(const std::vector<Vec2>& points) {
  return ReferencePath::FromPolyline(points, 5.0);
}

std::size_t BruteClosest(const ReferencePath& path, Vec2 p) {
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  const auto& w = path.waypoints();
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double d2 = (p.x - w[i].x) * (p.x - w[i].x) + (p.y - w[i].y) * (p.y - w[i].y);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

TEST(ClosestWaypointTest, Examples) {
  const ReferencePath path =
      Path({{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}});
  EXPECT_EQ(path.ClosestIndex({3, 0}), 3u);
  EXPECT_EQ(path.ClosestIndex({2.5, 0.7}), 2u);  // equidistant from 2 and 3
  EXPECT_EQ(path.ClosestIndex({-100, 40}), 0u);
  EXPECT_EQ(path.ClosestIndex({1e9, 0}), 5u);
}

TEST(ClosestWaypointTest, MatchesExhaustiveScanOnRandomPaths) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> turn(0.0, 0.3);
  std::uniform_real_distribution<double> step(0.2, 3.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Vec2> points{{0, 0}};
    double heading = 0.0;
    for (int k = 1; k < 100; ++k) {
      heading += turn(rng);
      const double s = step(rng);
      points.push_back({points.back().x + s * std::cos(heading),
                        points.back().y + s * std::sin(heading)});
    }
    const ReferencePath path = Path(points);
    double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
    for (const Vec2& p : points) {
      lo_x = std::min(lo_x, p.x), hi_x = std::max(hi_x, p.x);
      lo_y = std::min(lo_y, p.y), hi_y = std::max(hi_y, p.y);
    }
    for (int q = 0; q < 500; ++q) {
      // Queries spread well beyond the path's bounding box.
      const Vec2 p{lo_x - 40 + unit(rng) * (hi_x - lo_x + 80),
                   lo_y - 40 + unit(rng) * (hi_y - lo_y + 80)};
      ASSERT_EQ(path.ClosestIndex(p), BruteClosest(path, p));
    }
    for (const Vec2& p : points) {
      ASSERT_EQ(path.ClosestIndex(p), BruteClosest(path, p));
    }
  }
}

TEST(ClosestWaypointTest, TiesResolveToLowestIndex) {
  // Serpentine over an integer lattice, revisiting earlier points, queried
  // at half-integer positions where many waypoints tie.
  std::vector<Vec2> points;
  for (int row = 0; row < 6; ++row) {
    for (int k = 0; k < 10; ++k) {
      const double x = row % 2 == 0 ? k : 9 - k;
      points.push_back({x, static_cast<double>(row)});
    }
  }
  for (int k = 0; k < 10; ++k) points.push_back({9.0 - k, 0.0});
  const ReferencePath path = Path(points);
  for (double x = -2.0; x <= 11.0; x += 0.5) {
    for (double y = -2.0; y <= 8.0; y += 0.5) {
      ASSERT_EQ(path.ClosestIndex({x, y}), BruteClosest(path, {x, y}))
          << x << "," << y;
    }
  }
}

TEST(ReferencePathTest, FromPolylineYawAndTarget) {
  const ReferencePath path = Path({{0, 0}, {1, 1}, {1, 2}});
  const auto& w = path.waypoints();
  EXPECT_NEAR(w[0].yaw, std::atan2(1.0, 1.0), 1e-15);
  EXPECT_NEAR(w[1].yaw, std::atan2(1.0, 0.0), 1e-15);
  EXPECT_NEAR(w[2].yaw, std::atan2(1.0, 0.0), 1e-15);
  EXPECT_EQ(w[1].speed, 5.0);
  EXPECT_EQ(path.target(), (Vec2{1, 2}));
}

TEST(ReferencePathTest, Validation) {
  EXPECT_THROW(Path({{0, 0}}), std::invalid_argument);
  EXPECT_THROW(Path({{0, 0}, {0, 0}, {1, 0}}), std::invalid_argument);
  EXPECT_THROW(ReferencePath::FromPolyline(std::vector<Vec2>{{0, 0}, {1, 0}}, -1.0),
               std::invalid_argument);
  EXPECT_THROW(Path({{0, 0}, {std::nan(""), 0}}), std::invalid_argument);
}

TEST(SceneTest, CirclesAtCollectsAllTracks) {
  Scene scene;
  scene.tracks = {Box(0, 0, 0, 4.5, 1.8), Box(10, 0, 0, 2, 2)};
  scene.tracks[1].kind = ObstacleKind::kMoving;
  scene.tracks[1].velocity = {1, 0};
  scene.inflation_margin = 0.2;
  const auto circles = scene.CirclesAt(2.0);
  ASSERT_EQ(circles.size(), 4u);
  EXPECT_NEAR(circles[3].cx, 12.0, 1e-12);
  EXPECT_NEAR(circles[3].radius, std::sqrt(2.0) + 0.2, 1e-12);
}

}  // namespace
}  // namespace mppi
