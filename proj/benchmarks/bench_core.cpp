#include <benchmark/benchmark.h>

#include <random>

#include "regloc/decision.hpp"
#include "regloc/geometry.hpp"
#include "regloc/posterior.hpp"
#include "regloc/scenario.hpp"

using namespace regloc;

namespace {

MeasurementVector referenceMeasurement(const Scenario& sc, double sigma) {
  ChannelParams channel = sc.sensors.channel;
  channel.sigma = sigma;
  return sampleMeasurement(channel, sc.sensors.positions, *sc.fixedSource, 1, RandomStream(1));
}

void BM_RegionalLogDensity(benchmark::State& state) {
  const Scenario sc = referenceScenario();
  const double sigma = static_cast<double>(state.range(0)) / 1000.0;
  const MeasurementVector z = referenceMeasurement(sc, sigma);
  const auto used = allSensors(3);
  QuadratureSpec quad;
  quad.relTol = 1e-4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(regionalLogDensity(z, used, 1, sc.environment, sc.sensors, quad));
  }
}
BENCHMARK(BM_RegionalLogDensity)->Arg(300)->Arg(100)->Arg(10)->Unit(benchmark::kMicrosecond);

void BM_DecideAllToAllDesk(benchmark::State& state) {
  const Scenario sc = deskScenario();
  ChannelParams channel = sc.sensors.channel;
  channel.sigma = 0.5;
  std::mt19937_64 rng(3);
  const Point2 source = sampleUniform(sc.environment, rng);
  const MeasurementVector z = sampleMeasurement(channel, sc.sensors.positions, source, 1, RandomStream(2));
  const SensorConfig sensors{sc.sensors.positions, channel};
  for (auto _ : state) {
    benchmark::DoNotOptimize(decideAllToAll(z, sc.environment, sensors, sc.quad).chosenHypothesis);
  }
}
BENCHMARK(BM_DecideAllToAllDesk)->Unit(benchmark::kMillisecond);

void BM_DecideLimitedDesk(benchmark::State& state) {
  const Scenario sc = deskScenario();
  ChannelParams channel = sc.sensors.channel;
  channel.sigma = 0.5;
  std::mt19937_64 rng(3);
  const Point2 source = sampleUniform(sc.environment, rng);
  const MeasurementVector z = sampleMeasurement(channel, sc.sensors.positions, source, 1, RandomStream(2));
  const SensorConfig sensors{sc.sensors.positions, channel};
  const CommGraph graph = sc.buildGraph();
  for (auto _ : state) {
    benchmark::DoNotOptimize(decideLimited(1, z, graph, sc.environment, sensors, sc.quad).chosenHypothesis);
  }
}
BENCHMARK(BM_DecideLimitedDesk)->Unit(benchmark::kMillisecond);

void BM_SubtendedAngle(benchmark::State& state) {
  const Scenario sc = deskScenario();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> radius(0.1, 5.0);
  std::vector<std::pair<Point2, double>> circles;
  for (int i = 0; i < 256; ++i) circles.emplace_back(sampleUniform(sc.environment, rng), radius(rng));
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& [c, r] = circles[i++ % circles.size()];
    for (const auto& region : sc.environment.regions()) benchmark::DoNotOptimize(subtendedAngle(region, c, r));
  }
}
BENCHMARK(BM_SubtendedAngle);

void BM_VoronoiPartition(benchmark::State& state) {
  const PolygonRegion box(1, {{0, 0}, {10, 0}, {10, 10}, {0, 10}});
  const auto sites = randomSites(box, static_cast<int>(state.range(0)), 0.3, 9);
  for (auto _ : state) benchmark::DoNotOptimize(voronoiPartition(sites, box).size());
}
BENCHMARK(BM_VoronoiPartition)->Arg(20)->Arg(100)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
