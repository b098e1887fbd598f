#include <gtest/gtest.h>

#include <random>

#include "regloc/decision.hpp"
#include "regloc/errors.hpp"
#include "regloc/scenario.hpp"

using namespace regloc;

namespace {

Decision withChoice(RegionId id) {
  Decision d;
  d.chosenHypothesis = id;
  return d;
}

// 3 x 3 grid of unit cells with a sensor near each cell center.
struct Grid {
  Environment env;
  SensorConfig sensors;
};

Grid grid3() {
  std::vector<Point2> sites;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) sites.push_back({c + 0.5 + 0.07 * r, r + 0.5 - 0.05 * c});
  }
  const PolygonRegion box(1, {{0, 0}, {3, 0}, {3, 3}, {0, 3}});
  return {voronoiPartition(sites, box), {sites, {1.0, 1.0, 3.0, 0.0}}};
}

}  // namespace

TEST(CommGraph, ValidatesAndSymmetrizes) {
  EXPECT_THROW(CommGraph(3, {{1, 1}}), ConfigError);
  EXPECT_THROW(CommGraph(3, {{1, 4}}), ConfigError);
  const CommGraph g(4, {{2, 1}, {1, 2}, {3, 4}});
  EXPECT_EQ(g.edges().size(), 2u);
  EXPECT_EQ(g.neighbors(1), std::vector<int>{2});
  EXPECT_EQ(g.degree(4), 1);
  EXPECT_THROW(g.requireMinimumDegree(2), ConfigError);
  EXPECT_NO_THROW(CommGraph::complete(4).requireMinimumDegree(2));
  EXPECT_EQ(closedNeighborhood(g, 2), (std::vector<int>{1, 2}));
}

TEST(CommGraph, KNearestIsSymmetric) {
  const std::vector<Point2> pts{{0, 0}, {1, 0}, {5, 0}, {5, 1}, {9, 9}};
  const CommGraph g = CommGraph::kNearest(pts, 2);
  for (int i = 1; i <= 5; ++i) {
    for (int j : g.neighbors(i)) {
      const auto& back = g.neighbors(j);
      EXPECT_NE(std::find(back.begin(), back.end(), i), back.end());
    }
    EXPECT_GE(g.degree(i), 2);
  }
}

TEST(Collinearity, Threshold) {
  EXPECT_FALSE(hasNonCollinearTriple(std::vector<Point2>{{0, 0}, {1, 1}, {2, 2}, {3, 3}}));
  EXPECT_FALSE(hasNonCollinearTriple(std::vector<Point2>{{0, 0}, {1, 0}}));
  EXPECT_TRUE(hasNonCollinearTriple(std::vector<Point2>{{0, 0}, {1, 0}, {0, 1e-3}}));
  EXPECT_FALSE(hasNonCollinearTriple(std::vector<Point2>{{0, 0}, {1, 0}, {0.5, 1e-12}}));
}

TEST(Argmax, TiesGoToTheLowestId) {
  HypothesisPosterior p{{3, 1, 2, 0}, {-1.0, -1.0, -2.0, -1.0}};
  EXPECT_EQ(argmaxHypothesis(p), 0);
  p.logValues[3] = kNegInf;
  EXPECT_EQ(argmaxHypothesis(p), 1);
  HypothesisPosterior dead{{1, 2}, {kNegInf, kNegInf}};
  EXPECT_THROW(argmaxHypothesis(dead), NumericError);
}

TEST(Argmax, InvariantUnderConstantShift) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-50.0, 0.0);
  for (int t = 0; t < 1000; ++t) {
    HypothesisPosterior p;
    for (int j = 1; j <= 6; ++j) {
      p.hypothesisIds.push_back(j);
      p.logValues.push_back(std::round(u(rng)));  // integers make ties common
    }
    const RegionId before = argmaxHypothesis(p);
    const double shift = std::round(u(rng));
    for (double& v : p.logValues) v += shift;
    EXPECT_EQ(argmaxHypothesis(p), before);
  }
}

TEST(AllToAll, SmallNoisePicksTheSourceRegion) {
  const Scenario sc = referenceScenario();
  const Point2 source = sc.environment.region(2).centroid();
  MeasurementVector z = noiselessMeasurement(sc.sensors.channel, sc.sensors.positions, source);
  z.effectiveSigma = 0.01;
  const Decision d = decideAllToAll(z, sc.environment, sc.sensors, sc.quad);
  EXPECT_EQ(d.chosenHypothesis, 2);
  EXPECT_TRUE(d.assumptionHolds);
  EXPECT_EQ(d.decider, 0);
}

TEST(AllToAll, SymmetricTieGoesToTheLowestRegion) {
  // Halves mirrored about y = 0.5 with the sensors symmetric too; the source sits on
  // the shared edge, so both scores agree up to quadrature rounding.
  const Environment env({PolygonRegion(1, {{0, 0}, {2, 0}, {2, 0.5}, {0, 0.5}}),
                         PolygonRegion(2, {{0, 0.5}, {2, 0.5}, {2, 1}, {0, 1}})});
  const SensorConfig sensors{{{0.2, 0.5}, {1.0, 0.1}, {1.0, 0.9}}, {1.0, 1.0, 3.0, 0.0}};
  MeasurementVector z = noiselessMeasurement(sensors.channel, sensors.positions, {1.3, 0.5});
  z.effectiveSigma = 0.1;
  QuadratureSpec q;
  q.relTol = 1e-6;
  const Decision d = decideAllToAll(z, env, sensors, q);
  EXPECT_NEAR(d.logScores.logValues[0], d.logScores.logValues[1], 1e-5);
  HypothesisPosterior tied = d.logScores;
  tied.logValues[1] = tied.logValues[0];
  EXPECT_EQ(argmaxHypothesis(tied), 1);
}

TEST(Limited, OwnRegionAndOutsideHypothesis) {
  const Grid g = grid3();
  const CommGraph graph = CommGraph::kNearest(g.sensors.positions, 3);
  const int center = 5;
  MeasurementVector z = noiselessMeasurement(g.sensors.channel, g.sensors.positions, g.sensors.position(center));
  z.effectiveSigma = 0.01;
  const Decision own = decideLimited(center, z, graph, g.env, g.sensors, QuadratureSpec{});
  EXPECT_EQ(own.chosenHypothesis, center);
  EXPECT_EQ(own.decider, center);

  // Source in the far corner cell: sensor 1's neighborhood does not include it.
  MeasurementVector far = noiselessMeasurement(g.sensors.channel, g.sensors.positions, {2.9, 2.9});
  far.effectiveSigma = 0.01;
  const auto hood = closedNeighborhood(graph, 1);
  ASSERT_EQ(std::find(hood.begin(), hood.end(), containingRegion(g.env, {2.9, 2.9})), hood.end());
  EXPECT_EQ(decideLimited(1, far, graph, g.env, g.sensors, QuadratureSpec{}).chosenHypothesis, kOutsideHypothesis);
}

TEST(Limited, CompleteGraphMatchesAllToAll) {
  const Grid g = grid3();
  const CommGraph graph = CommGraph::complete(9);
  std::mt19937_64 rng(10);
  for (int seed = 0; seed < 30; ++seed) {
    const Point2 s = sampleUniform(g.env, rng);
    ChannelParams p = g.sensors.channel;
    p.sigma = 0.4;
    const MeasurementVector z = sampleMeasurement(p, g.sensors.positions, s, 1, RandomStream(seed));
    const RegionId a2a = decideAllToAll(z, g.env, g.sensors, QuadratureSpec{}).chosenHypothesis;
    for (int i : {1, 5, 9}) {
      const Decision d = decideLimited(i, z, graph, g.env, g.sensors, QuadratureSpec{});
      EXPECT_EQ(d.chosenHypothesis, a2a) << "seed " << seed << " sensor " << i;
      EXPECT_EQ(d.logScores.logValueOf(kOutsideHypothesis), kNegInf);
    }
  }
}

TEST(Limited, RequiresOneRegionPerSensor) {
  const Scenario sc = referenceScenario();  // 4 regions, 3 sensors
  MeasurementVector z = noiselessMeasurement(sc.sensors.channel, sc.sensors.positions, {0.3, 0.3});
  z.effectiveSigma = 0.1;
  EXPECT_THROW(decideLimited(1, z, CommGraph::complete(3), sc.environment, sc.sensors, sc.quad), ConfigError);
}

TEST(Noiseless, TrilaterationDecisionsAreExact) {
  const Grid g = grid3();
  const CommGraph graph = CommGraph::kNearest(g.sensors.positions, 3);
  std::mt19937_64 rng(14);
  for (int t = 0; t < 500; ++t) {
    const Point2 s = sampleUniform(g.env, rng);
    const RegionId truth = containingRegion(g.env, s);
    const MeasurementVector z = noiselessMeasurement(g.sensors.channel, g.sensors.positions, s);
    EXPECT_EQ(decideAllToAllNoiseless(z, g.env, g.sensors).chosenHypothesis, truth);
    EXPECT_EQ(decideLimitedNoiseless(truth, z, graph, g.env, g.sensors).chosenHypothesis, truth);
  }
}

TEST(Vote, MajorityTiesAndAbstention) {
  const std::vector<Decision> a{withChoice(2), withChoice(2), withChoice(3)};
  EXPECT_EQ(majorityVote(a), 2);
  const std::vector<Decision> b{withChoice(2), withChoice(1)};
  EXPECT_EQ(majorityVote(b), 1);
  const std::vector<Decision> c{withChoice(0), withChoice(0)};
  EXPECT_EQ(majorityVote(c), std::nullopt);
  const std::vector<Decision> d{withChoice(0), withChoice(0), withChoice(4)};
  EXPECT_EQ(majorityVote(d), 4);
  EXPECT_EQ(majorityVote(std::vector<Decision>{}), std::nullopt);
}

TEST(DecisionCsv, Rows) {
  EXPECT_EQ(formatDecisionRow(3, 0, 2, 2), "3,0,2,2,1");
  EXPECT_EQ(formatDecisionRow(3, 4, 0, 2), "3,4,0,2,0");
  EXPECT_EQ(formatDecisionRow(3, 4, 1, std::nullopt), "3,4,1,,");
}
