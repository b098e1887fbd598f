#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "regloc/errors.hpp"
#include "regloc/scenario.hpp"
#include "regloc/sweep.hpp"

using namespace regloc;

namespace {

const char* kSmall = R"(
; two by two grid of cells
[environment]
boundary = 0,0 2,0 2,2 0,2

[sensors]
positions = 0.5,0.5 1.5,0.5 0.5,1.5 1.5,1.5

[channel]
power = 1
d0 = 1
beta = 3
sigma = 0.2

[graph]
kind = complete

[run]
trials = 40
sigma_grid = 0,0.2
seed = 3
)";

Scenario small() { return parseScenario(kSmall); }

}  // namespace

TEST(ScenarioFile, ParsesEverySection) {
  const Scenario sc = small();
  EXPECT_EQ(sc.environment.size(), 4u);
  EXPECT_EQ(sc.sensors.size(), 4u);
  EXPECT_EQ(sc.sensors.channel.sigma, 0.2);
  EXPECT_EQ(sc.trials, 40);
  EXPECT_EQ(sc.seed, 3u);
  ASSERT_EQ(sc.sigmaGrid.size(), 2u);
  EXPECT_EQ(sc.sigmaGrid[1], 0.2);
  EXPECT_FALSE(sc.fixedSource.has_value());
  for (int i = 1; i <= 4; ++i) EXPECT_EQ(containingRegion(sc.environment, sc.sensors.position(i)), i);
  EXPECT_EQ(sc.buildGraph().degree(1), 3);
}

TEST(ScenarioFile, ExplicitRegionsGraphAndSource) {
  const Scenario sc = parseScenario(R"(
[regions]
1 = 0,0 1,0 1,1 0,1
2 = 1,0 2,0 2,1 1,1
[sensors]
positions = 0.5,0.5 1.5,0.5 1,0.9
[channel]
aggregation = linear
[graph]
kind = explicit
edges = 1-2 2-3 1-3
[source]
point = 1.2,0.4
[run]
k = 5
rel_tol = 0.01
)");
  EXPECT_EQ(sc.environment.size(), 2u);
  EXPECT_EQ(sc.aggregation, Aggregation::Linear);
  EXPECT_EQ(sc.buildGraph().edges().size(), 3u);
  EXPECT_EQ(*sc.fixedSource, (Point2{1.2, 0.4}));
  EXPECT_EQ(sc.k, 5);
  EXPECT_EQ(sc.quad.relTol, 0.01);
}

TEST(ScenarioFile, Errors) {
  EXPECT_THROW(parseScenario("[sensors]\npositions = 0,0\n[bogus]\nx = 1\n"), ConfigError);
  EXPECT_THROW(parseScenario("[environment]\nboundary = 0,0 1,0 1,1\n[sensors]\npositions = 0.5,0.2\ncolour = red\n"),
               ConfigError);
  EXPECT_THROW(parseScenario("[environment]\nboundary = 0,0 1,0 1,1\n"), ConfigError);
  EXPECT_THROW(parseScenario("[environment]\nboundary = 0,0 1,0 1,1\n[sensors]\npositions = 0.5,0.2\n[run]\nk = 0\n"),
               ConfigError);
  EXPECT_THROW(parseScenario("[environment]\nboundary = 0,0 1,0 1,1\n[sensors]\npositions = 0.5,0.2\n"
                             "[channel]\nbeta = 2\n"),
               ConfigError);
  EXPECT_THROW(parseScenario("[environment]\nboundary = 0,0 1,0 1,1\n[sensors]\npositions = 0.5,0.2\n"
                             "[source]\npoint = 5,5\n"),
               ConfigError);
  EXPECT_THROW(loadScenario("/nonexistent/scenario.ini"), ConfigError);
  EXPECT_THROW(resolveScenario("no-such-scenario"), ConfigError);
}

TEST(ScenarioFile, LoadsEnvironmentFileRelativeToItself) {
  const auto dir = std::filesystem::temp_directory_path() / "regloc_scenario_test";
  std::filesystem::create_directories(dir);
  const Scenario ref = referenceScenario();
  std::ofstream(dir / "env.txt") << formatEnvironment(ref.environment);
  std::ofstream(dir / "s.ini") << "[environment]\nfile = env.txt\n[sensors]\npositions = 0.2,0.2 0.8,0.3 0.4,0.8\n";
  const Scenario sc = loadScenario(dir / "s.ini");
  EXPECT_EQ(sc.environment.size(), 4u);
  EXPECT_NEAR(sc.environment.totalArea(), 1.0, 1e-12);
  std::filesystem::remove_all(dir);
}

TEST(BuiltIns, AreConsistent) {
  const Scenario ref = referenceScenario();
  EXPECT_NO_THROW(ref.validate());
  EXPECT_EQ(containingRegion(ref.environment, *ref.fixedSource), 1);
  const Scenario desk = deskScenario();
  EXPECT_NO_THROW(desk.validate());
  EXPECT_EQ(desk.sensors.size(), 20u);
  EXPECT_EQ(desk.environment.size(), 20u);
  EXPECT_EQ(desk.sigmaGrid.size(), 10u);
  EXPECT_NO_THROW(desk.buildGraph().requireMinimumDegree(2));
}

TEST(SampleUniform, CoversRegionsInProportionToArea) {
  const Scenario sc = deskScenario();
  std::mt19937_64 rng(4);
  std::vector<int> counts(sc.environment.size() + 1, 0);
  const int n = 200000;
  for (int t = 0; t < n; ++t) {
    const Point2 p = sampleUniform(sc.environment, rng);
    ++counts[static_cast<std::size_t>(containingRegion(sc.environment, p))];
  }
  for (const auto& r : sc.environment.regions()) {
    const double expected = r.area() / sc.environment.totalArea();
    const double sd = std::sqrt(expected * (1 - expected) / n);
    EXPECT_NEAR(counts[static_cast<std::size_t>(r.id())] / static_cast<double>(n), expected, 5 * sd);
  }
}

TEST(Sweep, NoiselessIsExactAndEmptyTrialsGiveNoRows) {
  Scenario sc = small();
  sc.sigmaGrid = {0.0};
  const std::vector<Algorithm> both{Algorithm::AllToAll, Algorithm::LimitedVote};
  const SweepResult r = runSweep(sc, both);
  ASSERT_EQ(r.rows.size(), 2u);
  for (const SweepRow& row : r.rows) {
    EXPECT_EQ(row.rate, 1.0);
    EXPECT_EQ(row.stderr_, 0.0);
  }
  sc.trials = 0;
  EXPECT_TRUE(runSweep(sc, both).rows.empty());
  EXPECT_EQ(formatSweepCsv(runSweep(sc, both)), std::string(kSweepCsvHeader) + "\n");
}

TEST(Sweep, RowsAreConsistentAndIndependentOfWorkers) {
  const Scenario sc = small();
  const std::vector<Algorithm> both{Algorithm::AllToAll, Algorithm::LimitedVote};
  std::vector<TrialRecord> records;
  const SweepResult one = runSweep(sc, both, 1, &records);
  const SweepResult three = runSweep(sc, both, 3);
  EXPECT_EQ(one.rows, three.rows);
  EXPECT_EQ(formatSweepCsv(one), formatSweepCsv(three));
  ASSERT_EQ(one.rows.size(), 4u);
  for (const SweepRow& row : one.rows) {
    EXPECT_EQ(row.trials, 40);
    EXPECT_EQ(row.rate, static_cast<double>(row.correct) / static_cast<double>(row.trials));
    EXPECT_DOUBLE_EQ(row.stderr_, std::sqrt(row.rate * (1 - row.rate) / row.trials));
  }
  EXPECT_EQ(records.size(), 80u);
  long long correct = 0;
  for (const TrialRecord& rec : records) {
    EXPECT_EQ(containingRegion(sc.environment, rec.source), rec.trueRegion);
    if (rec.sigmaIndex == 1 && rec.chosen[0] == rec.trueRegion) ++correct;
  }
  EXPECT_EQ(correct, one.rows[2].correct);
  EXPECT_EQ(one.curve(Algorithm::LimitedVote).size(), 2u);
  Scenario other = sc;
  other.seed = 4;
  EXPECT_NE(formatSweepCsv(runSweep(other, both)), formatSweepCsv(one));
}

TEST(Sweep, LimitedNeedsOneRegionPerSensor) {
  Scenario sc = referenceScenario();
  sc.trials = 2;
  const std::vector<Algorithm> limited{Algorithm::LimitedVote};
  EXPECT_THROW(runSweep(sc, limited), ConfigError);
}

TEST(SweepCsv, RoundTrips) {
  const SweepResult r = runSweep(small(), std::vector<Algorithm>{Algorithm::AllToAll});
  const std::string csv = formatSweepCsv(r);
  EXPECT_EQ(formatSweepCsv(parseSweepCsv(csv)), csv);
  EXPECT_EQ(parseSweepCsv(csv).rows, r.rows);
  EXPECT_THROW(parseSweepCsv("sigma,algorithm\n0.1,a2a\n"), ConfigError);
  EXPECT_THROW(parseAlgorithm("majority"), ConfigError);
  EXPECT_EQ(parseAlgorithm(algorithmName(Algorithm::LimitedVote)), Algorithm::LimitedVote);
}

TEST(PlotData, HasOneBlockPerAlgorithm) {
  SweepResult r;
  r.rows = {{0.1, Algorithm::AllToAll, 10, 9, 0.9, 0.1}, {0.1, Algorithm::LimitedVote, 10, 8, 0.8, 0.1},
            {0.2, Algorithm::AllToAll, 10, 7, 0.7, 0.1}};
  const std::string plot = formatPlotData(r);
  EXPECT_NE(plot.find("# algorithm a2a"), std::string::npos);
  EXPECT_NE(plot.find("# algorithm limited"), std::string::npos);
  EXPECT_NE(plot.find("\n\n\n"), std::string::npos);
  EXPECT_EQ(r.curve(Algorithm::AllToAll).size(), 2u);
}

TEST(Isotonic, PoolsViolators) {
  const std::vector<double> v{0.9, 0.7, 0.8, 0.5};
  const std::vector<double> w{1, 1, 1, 1};
  const auto fit = isotonicNonincreasing(v, w);
  EXPECT_DOUBLE_EQ(fit[0], 0.9);
  EXPECT_DOUBLE_EQ(fit[1], 0.75);
  EXPECT_DOUBLE_EQ(fit[2], 0.75);
  EXPECT_DOUBLE_EQ(fit[3], 0.5);
}

TEST(Isotonic, PropertyNonincreasingAndIdempotent) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t n = 1 + static_cast<std::size_t>(u(rng) * 12);
    std::vector<double> v(n);
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = u(rng);
      w[i] = 0.1 + u(rng);
    }
    const auto fit = isotonicNonincreasing(v, w);
    double mass = 0.0;
    double fitted = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) ASSERT_LE(fit[i], fit[i - 1] + 1e-12);
      mass += w[i] * v[i];
      fitted += w[i] * fit[i];
    }
    EXPECT_NEAR(mass, fitted, 1e-9);
    const auto again = isotonicNonincreasing(fit, w);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(again[i], fit[i], 1e-12);
  }
}
