#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "regloc/channel.hpp"
#include "regloc/decision.hpp"
#include "regloc/geometry.hpp"
#include "regloc/quadrature.hpp"

namespace regloc {

struct GraphSpec {
  enum class Kind { Complete, KNearest, Explicit };
  Kind kind = Kind::Complete;
  int neighbors = 4;                        ///< KNearest
  std::vector<std::pair<int, int>> edges;  ///< Explicit
};

/// Everything a sweep needs. Sensor i sits in region i whenever the
/// limited-communication algorithm is used.
struct Scenario {
  Environment environment;
  SensorConfig sensors;  ///< channel.sigma is the default when no grid is given
  GraphSpec graph{};
  std::optional<Point2> fixedSource{};  ///< nullopt: uniform over the environment
  int k = 1;
  long long trials = 500;
  std::vector<double> sigmaGrid{};
  std::uint64_t seed = 1;
  Aggregation aggregation = Aggregation::LogDomain;
  QuadratureSpec quad{12, 1e-3, 30.0};

  CommGraph buildGraph() const;
  /// Throws ConfigError for inconsistent sizes or sources outside C.
  void validate() const;
};

/// Reads the key = value scenario format (see the README for the grammar).
/// Relative paths inside the file resolve against its directory.
Scenario loadScenario(const std::filesystem::path& path);
Scenario parseScenario(const std::string& text, const std::filesystem::path& baseDir = {});

/// Three sensors in the unit square split into four quadrant cells, with a
/// fixed source in cell 1.
Scenario referenceScenario();
/// Twenty random sensors on a 10 x 10 square, Voronoi regions, 4-nearest
/// communication graph, ten-point sigma grid.
Scenario deskScenario();

/// "reference" and "desk" name the built-ins; anything else is a file path.
Scenario resolveScenario(const std::string& nameOrPath);

/// Uniform point in the environment: a triangle picked by area, then a
/// uniform point inside it.
Point2 sampleUniform(const Environment& env, std::mt19937_64& engine);

/// `count` points uniform inside `boundary`, pairwise at least `minSeparation`
/// apart. Throws ConfigError when the packing cannot be found.
std::vector<Point2> randomSites(const PolygonRegion& boundary, int count, double minSeparation,
                                std::uint64_t seed);

}  // namespace regloc
