#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "regloc/channel.hpp"
#include "regloc/geometry.hpp"
#include "regloc/posterior.hpp"

namespace regloc {

/// Undirected communication graph over sensors 1..nodeCount.
class CommGraph {
 public:
  /// Throws ConfigError on self-loops or out-of-range endpoints. Duplicate
  /// edges collapse.
  CommGraph(int nodeCount, std::vector<std::pair<int, int>> edges);

  static CommGraph complete(int nodeCount);
  /// Each node linked to its `neighbors` nearest nodes, then symmetrized.
  static CommGraph kNearest(std::span<const Point2> positions, int neighbors);

  int nodeCount() const { return nodeCount_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  /// Sorted neighbor ids of `node`, excluding itself.
  const std::vector<int>& neighbors(int node) const;
  int degree(int node) const { return static_cast<int>(neighbors(node).size()); }
  /// Throws ConfigError unless every node has degree >= 2.
  void requireMinimumDegree(int minimum = 2) const;

 private:
  int nodeCount_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adjacency_;
};

struct Decision {
  SensorId decider = 0;  ///< 0 for the fused all-to-all decision
  RegionId chosenHypothesis = kOutsideHypothesis;
  HypothesisPosterior logScores;
  bool assumptionHolds = true;  ///< at least three non-collinear sensors were used
};

/// Some triple spans a triangle with |cross| > 1e-9 * (bounding-box scale)^2.
bool hasNonCollinearTriple(std::span<const Point2> points);

/// Highest score; ties go to the lowest hypothesis id. Throws NumericError if
/// every score is -infinity.
RegionId argmaxHypothesis(const HypothesisPosterior& scores);

/// Closed neighborhood {i} plus neighbors of i, sorted.
std::vector<int> closedNeighborhood(const CommGraph& graph, SensorId sensor);

/// MAP over every region with every sensor's measurement.
Decision decideAllToAll(const MeasurementVector& z, const Environment& env, const SensorConfig& sensors,
                        const QuadratureSpec& quad);

/// MAP at `sensor` over its neighborhood regions plus the outside hypothesis,
/// using only neighborhood measurements. Region i is sensor i's own region.
Decision decideLimited(SensorId sensor, const MeasurementVector& z, const CommGraph& graph,
                       const Environment& env, const SensorConfig& sensors, const QuadratureSpec& quad);

/// Zero-noise limits: the posterior collapses onto the trilaterated source.
Decision decideAllToAllNoiseless(const MeasurementVector& z, const Environment& env,
                                 const SensorConfig& sensors);
Decision decideLimitedNoiseless(SensorId sensor, const MeasurementVector& z, const CommGraph& graph,
                                const Environment& env, const SensorConfig& sensors);

/// Mode of the non-outside decisions, ties to the lowest id; nullopt when
/// nobody placed the source inside its neighborhood.
std::optional<RegionId> majorityVote(std::span<const Decision> decisions);

/// CSV row `trial,decider,chosen,trueRegion,correct`; an unknown truth leaves
/// the last two fields empty.
std::string formatDecisionRow(long long trial, SensorId decider, RegionId chosen,
                              std::optional<RegionId> truth);
inline constexpr const char* kDecisionCsvHeader = "trial,decider,chosen,trueRegion,correct";

}  // namespace regloc
