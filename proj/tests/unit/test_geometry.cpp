#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "regloc/errors.hpp"
#include "regloc/geometry.hpp"

using namespace regloc;

namespace {

constexpr double kPi = std::numbers::pi;

PolygonRegion unitSquare(RegionId id = 1) { return PolygonRegion(id, {{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

Environment quadrants() {
  return voronoiPartition(std::vector<Point2>{{0.25, 0.25}, {0.75, 0.25}, {0.25, 0.75}, {0.75, 0.75}},
                          unitSquare());
}

// Random convex polygon: sorted angles around a center, jittered radii.
std::vector<Point2> randomConvex(std::mt19937_64& rng, Point2 center, double radius) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 3 + static_cast<int>(u(rng) * 6);
  std::vector<double> angles;
  for (int i = 0; i < n; ++i) angles.push_back(u(rng) * 2 * kPi);
  std::sort(angles.begin(), angles.end());
  std::vector<Point2> pts;
  for (double a : angles) pts.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
  return pts;
}

}  // namespace

TEST(Polygon, ReorientsClockwiseInputAndDropsClosingVertex) {
  const PolygonRegion r(1, {{0, 0}, {0, 1}, {1, 1}, {1, 0}, {0, 0}});
  EXPECT_EQ(r.vertices().size(), 4u);
  EXPECT_DOUBLE_EQ(r.area(), 1.0);
  EXPECT_NEAR(r.centroid().x, 0.5, 1e-15);
  EXPECT_TRUE(r.isConvex());
}

TEST(Polygon, RejectsDegenerateInput) {
  EXPECT_THROW(PolygonRegion(1, {{0, 0}, {1, 0}}), ConfigError);
  EXPECT_THROW(PolygonRegion(1, {{0, 0}, {1, 0}, {2, 0}}), ConfigError);
  EXPECT_THROW(PolygonRegion(1, {{0, 0}, {1, 1}, {1, 0}, {0, 1}}), ConfigError);  // bow tie
  EXPECT_THROW(PolygonRegion(1, {{0, 0}, {1, 0}, {NAN, 1}}), ConfigError);
}

TEST(Polygon, EarClipCoversNonConvexPolygon) {
  const PolygonRegion r(1, {{0, 0}, {4, 0}, {4, 3}, {2, 1}, {0, 3}});
  double total = 0.0;
  for (const Triangle& t : r.triangles()) {
    EXPECT_GT(cross(t.b - t.a, t.c - t.a), 0.0);
    total += t.area();
  }
  EXPECT_NEAR(total, r.area(), 1e-12);
  EXPECT_FALSE(r.isConvex());
}

TEST(Polygon, LocateClassifiesBoundary) {
  const PolygonRegion r = unitSquare();
  EXPECT_EQ(r.locate({0.5, 0.5}), Location::Inside);
  EXPECT_EQ(r.locate({1.0, 0.5}), Location::Boundary);
  EXPECT_EQ(r.locate({1.5, 0.5}), Location::Outside);
}

TEST(Environment, RejectsOverlapGapsAndBadIds) {
  EXPECT_THROW(Environment({unitSquare(1), PolygonRegion(2, {{0.5, 0}, {1.5, 0}, {1.5, 1}, {0.5, 1}})}),
               ConfigError);
  EXPECT_THROW(Environment({unitSquare(1), PolygonRegion(2, {{2, 0}, {3, 0}, {3, 1}, {2, 1}})}), ConfigError);
  EXPECT_THROW(Environment({unitSquare(1), PolygonRegion(3, {{1, 0}, {2, 0}, {2, 1}, {1, 1}})}), ConfigError);
  const Environment ok({PolygonRegion(2, {{1, 0}, {2, 0}, {2, 1}, {1, 1}}), unitSquare(1)});
  EXPECT_EQ(ok.region(1).id(), 1);
  EXPECT_DOUBLE_EQ(ok.totalArea(), 2.0);
}

TEST(Voronoi, TwoSymmetricSitesSplitTheSquareInHalf) {
  const Environment env = voronoiPartition(std::vector<Point2>{{0.25, 0.5}, {0.75, 0.5}}, unitSquare());
  ASSERT_EQ(env.size(), 2u);
  EXPECT_NEAR(env.region(1).area(), 0.5, 1e-15);
  EXPECT_NEAR(env.region(2).area(), 0.5, 1e-15);
}

TEST(Voronoi, SingleSiteKeepsTheBoundary) {
  const Environment env = voronoiPartition(std::vector<Point2>{{0.3, 0.6}}, unitSquare());
  ASSERT_EQ(env.size(), 1u);
  EXPECT_DOUBLE_EQ(env.region(1).area(), 1.0);
}

TEST(Voronoi, CellsAgreeWithNearestSite) {
  const std::vector<Point2> sites{{0.2, 0.15}, {0.85, 0.2}, {0.1, 0.9}, {0.7, 0.8}};
  const Environment env = voronoiPartition(sites, unitSquare());
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  for (int s = 0; s < 10000; ++s) {
    const Point2 p{u(rng), u(rng)};
    const std::size_t near = oracle::nearestSite(sites, p);
    // Skip points within rounding distance of a bisector.
    bool ambiguous = false;
    for (std::size_t j = 0; j < sites.size(); ++j) {
      if (j != near && std::abs(distance(p, sites[j]) - distance(p, sites[near])) < 1e-9) ambiguous = true;
    }
    if (ambiguous) continue;
    EXPECT_EQ(containingRegion(env, p), static_cast<RegionId>(near + 1)) << p.x << "," << p.y;
    ++checked;
  }
  EXPECT_GT(checked, 9900);
}

TEST(Voronoi, RejectsBadSites) {
  EXPECT_THROW(voronoiPartition(std::vector<Point2>{{0.5, 0.5}, {0.5, 0.5}}, unitSquare()), ConfigError);
  EXPECT_THROW(voronoiPartition(std::vector<Point2>{{0.5, 0.5}, {1.0, 0.5}}, unitSquare()), ConfigError);
  EXPECT_THROW(voronoiPartition(std::vector<Point2>{{0.5, 0.5}, {1.5, 0.5}}, unitSquare()), ConfigError);
  const PolygonRegion notch(1, {{0, 0}, {4, 0}, {4, 3}, {2, 1}, {0, 3}});
  EXPECT_THROW(voronoiPartition(std::vector<Point2>{{1, 0.5}}, notch), ConfigError);
}

TEST(Voronoi, RandomPartitionsTileTheBoundary) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  const PolygonRegion square = unitSquare();
  for (int round = 0; round < 50; ++round) {
    std::vector<Point2> sites;
    const int n = 2 + round % 12;
    for (int i = 0; i < n; ++i) sites.push_back({u(rng), u(rng)});
    const Environment env = voronoiPartition(sites, square);
    double sum = 0.0;
    for (const auto& r : env.regions()) {
      sum += r.area();
      EXPECT_NE(r.locate(sites[static_cast<std::size_t>(r.id() - 1)]), Location::Outside);
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
    EXPECT_NEAR(env.totalArea(), 1.0, 1e-9);
  }
}

TEST(ContainingRegion, CentroidAndSharedEdgeTieRule) {
  const Environment env = quadrants();
  EXPECT_EQ(containingRegion(env, env.region(3).centroid()), 3);
  EXPECT_EQ(containingRegion(env, {0.5, 0.25}), 1);  // edge shared by 1 and 2
  EXPECT_EQ(containingRegion(env, {0.5, 0.5}), 1);   // corner of all four
  EXPECT_THROW(containingRegion(env, {1.5, 0.5}), ConfigError);
}

TEST(ContainingRegion, AgreesWithWindingNumberOracle) {
  const Environment env = voronoiPartition(
      std::vector<Point2>{{0.13, 0.2}, {0.8, 0.33}, {0.41, 0.77}, {0.5, 0.45}, {0.9, 0.9}}, unitSquare());
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int s = 0; s < 10000; ++s) {
    const Point2 p{u(rng), u(rng)};
    RegionId expected = 0;
    for (const auto& r : env.regions()) {
      if (oracle::insideRing(oracle::ringOf(r), p)) {
        expected = r.id();
        break;
      }
    }
    if (expected == 0) continue;  // exactly on a boundary: the oracle has no opinion
    EXPECT_EQ(containingRegion(env, p), expected);
  }
}

TEST(SubtendedAngle, TrivialCases) {
  const PolygonRegion sq = unitSquare();
  EXPECT_DOUBLE_EQ(subtendedAngle(sq, {0.5, 0.5}, 0.2), 2 * kPi);
  EXPECT_NEAR(subtendedAngle(sq, {0.0, 0.0}, 0.5), kPi / 2, 1e-12);
  EXPECT_DOUBLE_EQ(subtendedAngle(sq, {0.5, 0.5}, 0.0), 2 * kPi);
  EXPECT_DOUBLE_EQ(subtendedAngle(sq, {2.0, 0.5}, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(subtendedAngle(sq, {3.0, 3.0}, 0.5), 0.0);
  EXPECT_NEAR(subtendedAngle(sq, {0.5, 0.5}, 0.5), 2 * kPi, 1e-9);  // tangent to all four sides
  EXPECT_THROW(subtendedAngle(sq, {0.5, 0.5}, -1.0), ConfigError);
}

TEST(SubtendedAngle, MatchesAngularSampling) {
  const PolygonRegion poly(1, {{0.1, 0.0}, {1.3, 0.2}, {1.5, 1.1}, {0.6, 1.6}, {-0.2, 0.9}});
  const auto ring = oracle::ringOf(poly);
  const std::vector<std::pair<Point2, double>> circles{
      {{0.7, 0.7}, 0.85}, {{1.4, 0.1}, 0.4}, {{0.7, 0.7}, 0.6}, {{-0.5, 0.5}, 0.6}, {{0.6, 0.8}, 1.2}};
  for (auto [c, r] : circles) {
    EXPECT_NEAR(subtendedAngle(poly, c, r), oracle::sampledAngle(ring, c, r, 1'000'000), 1e-4)
        << c.x << "," << c.y << " r=" << r;
  }
}

TEST(SubtendedAngle, MonotoneUnderInclusion) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int round = 0; round < 200; ++round) {
    const auto outer = randomConvex(rng, {0.5, 0.5}, 0.5);
    const Point2 c = PolygonRegion(1, outer).centroid();
    std::vector<Point2> inner;
    const double shrink = 0.2 + 0.7 * u(rng);
    for (const Point2& p : outer) inner.push_back(c + shrink * (p - c));
    const PolygonRegion big(1, outer);
    const PolygonRegion small(2, inner);
    const Point2 x{u(rng) * 1.4 - 0.2, u(rng) * 1.4 - 0.2};
    const double r = u(rng) * 0.8;
    EXPECT_LE(subtendedAngle(small, x, r), subtendedAngle(big, x, r) + 1e-9);
  }
}

TEST(SubtendedAngle, ArcsOfAPartitionTileTheCircle) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.1, 0.9);
  for (int round = 0; round < 100; ++round) {
    std::vector<Point2> sites;
    for (int i = 0; i < 6; ++i) sites.push_back({u(rng), u(rng)});
    const Environment env = voronoiPartition(sites, unitSquare());
    const Point2 x{u(rng), u(rng)};
    const double room = std::min({x.x, x.y, 1 - x.x, 1 - x.y});
    const double r = room * (0.05 + 0.9 * (u(rng) - 0.1) / 0.8);
    double total = 0.0;
    for (const auto& region : env.regions()) total += subtendedAngle(region, x, r);
    EXPECT_NEAR(total, 2 * kPi, 1e-9);
  }
}

TEST(RegionDistance, ExamplesAndSamplingOracle) {
  const PolygonRegion sq = unitSquare();
  EXPECT_DOUBLE_EQ(regionDistance(sq, {0.4, 0.4}), 0.0);
  EXPECT_DOUBLE_EQ(regionDistance(sq, {2.0, 0.5}), 1.0);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  for (int round = 0; round < 40; ++round) {
    const auto ring = randomConvex(rng, {0.5, 0.5}, 0.6);
    const PolygonRegion poly(1, ring);
    const Point2 p{u(rng), u(rng)};
    if (poly.locate(p, 0.0) != Location::Outside) continue;
    EXPECT_NEAR(regionDistance(poly, p), oracle::sampledBoundaryDistance(ring, p, 20000), 1e-6);
  }
}

TEST(EnvironmentText, RoundTrips) {
  const Environment env = quadrants();
  const std::string text = formatEnvironment(env);
  const Environment back = parseEnvironment("# four cells\n\n" + text);
  ASSERT_EQ(back.size(), env.size());
  EXPECT_EQ(formatEnvironment(back), text);
  EXPECT_THROW(parseEnvironment("1 0,0 1,0 1,1"), ConfigError);
  EXPECT_THROW(parseEnvironment("1: 0,0 1,0 x,1"), ConfigError);
}
