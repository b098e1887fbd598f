#include "regloc/decision.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "regloc/asymptotic.hpp"
#include "regloc/errors.hpp"

namespace regloc {

CommGraph::CommGraph(int nodeCount, std::vector<std::pair<int, int>> edges) : nodeCount_(nodeCount) {
  if (nodeCount < 1) throw ConfigError("graph: needs at least one node");
  adjacency_.resize(static_cast<std::size_t>(nodeCount));
  for (auto [a, b] : edges) {
    if (a < 1 || b < 1 || a > nodeCount || b > nodeCount) {
      throw ConfigError("graph: edge " + std::to_string(a) + "-" + std::to_string(b) + " out of range");
    }
    if (a == b) throw ConfigError("graph: self-loop at node " + std::to_string(a));
    if (a > b) std::swap(a, b);
    edges_.emplace_back(a, b);
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  for (auto [a, b] : edges_) {
    adjacency_[static_cast<std::size_t>(a - 1)].push_back(b);
    adjacency_[static_cast<std::size_t>(b - 1)].push_back(a);
  }
  for (auto& list : adjacency_) std::sort(list.begin(), list.end());
}

CommGraph CommGraph::complete(int nodeCount) {
  std::vector<std::pair<int, int>> edges;
  for (int a = 1; a <= nodeCount; ++a) {
    for (int b = a + 1; b <= nodeCount; ++b) edges.emplace_back(a, b);
  }
  return CommGraph(nodeCount, std::move(edges));
}

CommGraph CommGraph::kNearest(std::span<const Point2> positions, int neighbors) {
  const int n = static_cast<int>(positions.size());
  if (neighbors < 1) throw ConfigError("graph: k-nearest needs k >= 1");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    std::vector<int> others;
    for (int j = 0; j < n; ++j) {
      if (j != i) others.push_back(j);
    }
    std::stable_sort(others.begin(), others.end(), [&](int a, int b) {
      return squaredDistance(positions[static_cast<std::size_t>(i)], positions[static_cast<std::size_t>(a)]) <
             squaredDistance(positions[static_cast<std::size_t>(i)], positions[static_cast<std::size_t>(b)]);
    });
    const int take = std::min<int>(neighbors, static_cast<int>(others.size()));
    for (int t = 0; t < take; ++t) edges.emplace_back(i + 1, others[static_cast<std::size_t>(t)] + 1);
  }
  return CommGraph(n, std::move(edges));
}

const std::vector<int>& CommGraph::neighbors(int node) const {
  if (node < 1 || node > nodeCount_) throw ConfigError("graph: no node " + std::to_string(node));
  return adjacency_[static_cast<std::size_t>(node - 1)];
}

void CommGraph::requireMinimumDegree(int minimum) const {
  for (int i = 1; i <= nodeCount_; ++i) {
    if (degree(i) < minimum) {
      throw ConfigError("graph: node " + std::to_string(i) + " has degree " + std::to_string(degree(i)) +
                        ", limited communication needs at least " + std::to_string(minimum));
    }
  }
}

bool hasNonCollinearTriple(std::span<const Point2> points) {
  if (points.size() < 3) return false;
  const double scale = boundsOf(points).scale();
  const double threshold = 1e-9 * scale * scale;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      for (std::size_t k = j + 1; k < points.size(); ++k) {
        if (std::abs(cross(points[j] - points[i], points[k] - points[i])) > threshold) return true;
      }
    }
  }
  return false;
}

RegionId argmaxHypothesis(const HypothesisPosterior& scores) {
  RegionId best = kOutsideHypothesis;
  double bestValue = kNegInf;
  bool found = false;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double v = scores.logValues[i];
    const RegionId id = scores.hypothesisIds[i];
    if (v == kNegInf) continue;
    if (!found || v > bestValue || (v == bestValue && id < best)) {
      best = id;
      bestValue = v;
      found = true;
    }
  }
  if (!found) throw NumericError("no decision: every hypothesis has zero posterior mass");
  return best;
}

std::vector<int> closedNeighborhood(const CommGraph& graph, SensorId sensor) {
  std::vector<int> out = graph.neighbors(sensor);
  out.push_back(sensor);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::vector<Point2> positionsOf(const SensorConfig& sensors, std::span<const int> ids) {
  std::vector<Point2> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(sensors.position(id));
  return out;
}

void requirePartitionedScenario(const Environment& env, const SensorConfig& sensors,
                                const CommGraph& graph) {
  if (env.size() != sensors.size() || graph.nodeCount() != static_cast<int>(sensors.size())) {
    throw ConfigError("limited communication needs one region and one graph node per sensor");
  }
}

}  // namespace

Decision decideAllToAll(const MeasurementVector& z, const Environment& env, const SensorConfig& sensors,
                        const QuadratureSpec& quad) {
  const std::vector<SensorId> used = allSensors(sensors.size());
  const std::vector<RegionId> hypotheses = env.ids();
  Decision d;
  d.logScores = jointPosterior(z, used, hypotheses, env, sensors, quad);
  d.chosenHypothesis = argmaxHypothesis(d.logScores);
  d.assumptionHolds = hasNonCollinearTriple(sensors.positions);
  return d;
}

Decision decideLimited(SensorId sensor, const MeasurementVector& z, const CommGraph& graph,
                       const Environment& env, const SensorConfig& sensors, const QuadratureSpec& quad) {
  requirePartitionedScenario(env, sensors, graph);
  const std::vector<int> hood = closedNeighborhood(graph, sensor);
  const PosteriorEvaluator eval(z, hood, env, sensors, quad);
  Decision d;
  d.decider = sensor;
  for (int j : hood) {
    d.logScores.hypothesisIds.push_back(j);
    d.logScores.logValues.push_back(eval.regionLog(j));
  }
  d.logScores.hypothesisIds.push_back(kOutsideHypothesis);
  d.logScores.logValues.push_back(eval.complementLog(hood));
  d.chosenHypothesis = argmaxHypothesis(d.logScores);
  const auto pts = positionsOf(sensors, hood);
  d.assumptionHolds = hasNonCollinearTriple(pts);
  return d;
}

Decision decideAllToAllNoiseless(const MeasurementVector& z, const Environment& env,
                                  const SensorConfig& sensors) {
  Decision d;
  d.assumptionHolds = hasNonCollinearTriple(sensors.positions);
  if (!d.assumptionHolds) throw NumericError("noiseless decision needs three non-collinear sensors");
  std::vector<double> radii;
  for (double lp : z.logPowers) radii.push_back(radiusFromPower(sensors.channel, lp));
  d.chosenHypothesis = containingRegion(env, trilaterate(sensors.positions, radii));
  return d;
}

Decision decideLimitedNoiseless(SensorId sensor, const MeasurementVector& z, const CommGraph& graph,
                                const Environment& env, const SensorConfig& sensors) {
  requirePartitionedScenario(env, sensors, graph);
  const std::vector<int> hood = closedNeighborhood(graph, sensor);
  const auto pts = positionsOf(sensors, hood);
  Decision d;
  d.decider = sensor;
  d.assumptionHolds = hasNonCollinearTriple(pts);
  if (!d.assumptionHolds) throw NumericError("noiseless decision needs three non-collinear sensors");
  std::vector<double> radii;
  for (int id : hood) radii.push_back(radiusFromPower(sensors.channel, z.logPowers[static_cast<std::size_t>(id - 1)]));
  const RegionId where = containingRegion(env, trilaterate(pts, radii));
  d.chosenHypothesis = std::binary_search(hood.begin(), hood.end(), where) ? where : kOutsideHypothesis;
  return d;
}

std::optional<RegionId> majorityVote(std::span<const Decision> decisions) {
  std::map<RegionId, int> tally;
  for (const Decision& d : decisions) {
    if (d.chosenHypothesis != kOutsideHypothesis) ++tally[d.chosenHypothesis];
  }
  if (tally.empty()) return std::nullopt;
  // std::map iterates in ascending id, so strict > keeps the lowest id on ties.
  RegionId best = tally.begin()->first;
  int votes = 0;
  for (const auto& [id, count] : tally) {
    if (count > votes) {
      best = id;
      votes = count;
    }
  }
  return best;
}

std::string formatDecisionRow(long long trial, SensorId decider, RegionId chosen,
                              std::optional<RegionId> truth) {
  std::string out = std::to_string(trial) + "," + std::to_string(decider) + "," + std::to_string(chosen) + ",";
  if (truth) {
    out += std::to_string(*truth) + "," + (chosen == *truth ? "1" : "0");
  } else {
    out += ",";
  }
  return out;
}

}  // namespace regloc
