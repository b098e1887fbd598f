#include "regloc/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "regloc/errors.hpp"
#include "regloc/parallel.hpp"
#include "regloc/text.hpp"

namespace regloc {

std::string_view algorithmName(Algorithm a) { return a == Algorithm::AllToAll ? "a2a" : "limited"; }

Algorithm parseAlgorithm(std::string_view name) {
  if (name == "a2a") return Algorithm::AllToAll;
  if (name == "limited") return Algorithm::LimitedVote;
  throw ConfigError("unknown algorithm '" + std::string(name) + "' (expected a2a or limited)");
}

std::vector<SweepRow> SweepResult::curve(Algorithm a) const {
  std::vector<SweepRow> out;
  for (const SweepRow& r : rows) {
    if (r.algorithm == a) out.push_back(r);
  }
  return out;
}

namespace {

RegionId runLimited(const MeasurementVector& z, bool noiseless, const CommGraph& graph, const Scenario& sc) {
  std::vector<Decision> decisions;
  decisions.reserve(sc.sensors.size());
  for (int i = 1; i <= graph.nodeCount(); ++i) {
    decisions.push_back(noiseless ? decideLimitedNoiseless(i, z, graph, sc.environment, sc.sensors)
                                  : decideLimited(i, z, graph, sc.environment, sc.sensors, sc.quad));
  }
  return majorityVote(decisions).value_or(kOutsideHypothesis);
}

}  // namespace

SweepResult runSweep(const Scenario& scenario, std::span<const Algorithm> algorithms, unsigned workers,
                     std::vector<TrialRecord>* records) {
  scenario.validate();
  SweepResult result;
  if (!hasNonCollinearTriple(scenario.sensors.positions)) {
    result.warnings.push_back("fewer than three non-collinear sensors; the all-to-all decision may be ambiguous");
  }
  std::optional<CommGraph> graph;
  if (std::find(algorithms.begin(), algorithms.end(), Algorithm::LimitedVote) != algorithms.end()) {
    if (scenario.environment.size() != scenario.sensors.size()) {
      throw ConfigError("limited communication needs one region per sensor");
    }
    graph.emplace(scenario.buildGraph());
    graph->requireMinimumDegree(2);
    for (int i = 1; i <= graph->nodeCount(); ++i) {
      std::vector<Point2> pts;
      for (int j : closedNeighborhood(*graph, i)) pts.push_back(scenario.sensors.position(j));
      if (!hasNonCollinearTriple(pts)) {
        result.warnings.push_back("neighborhood of sensor " + std::to_string(i) + " is collinear");
      }
    }
  }
  if (scenario.trials <= 0) return result;

  const auto trials = static_cast<std::size_t>(scenario.trials);
  const RandomStream master(scenario.seed);
  for (std::size_t g = 0; g < scenario.sigmaGrid.size(); ++g) {
    ChannelParams channel = scenario.sensors.channel;
    channel.sigma = scenario.sigmaGrid[g];
    Scenario local = scenario;
    local.sensors.channel = channel;
    const bool noiseless = channel.sigma == 0.0;

    std::vector<TrialRecord> outcomes(trials);
    parallelFor(trials, workers, [&](std::size_t t) {
      const RandomStream stream = master.derive(g).derive(t);
      TrialRecord& rec = outcomes[t];
      rec.sigmaIndex = g;
      rec.trial = static_cast<long long>(t);
      if (scenario.fixedSource) {
        rec.source = *scenario.fixedSource;
      } else {
        auto engine = stream.derive(0).engine(0);
        rec.source = sampleUniform(scenario.environment, engine);
      }
      rec.trueRegion = containingRegion(scenario.environment, rec.source);
      const MeasurementVector z = sampleMeasurement(channel, scenario.sensors.positions, rec.source, scenario.k,
                                                    stream.derive(1), scenario.aggregation);
      for (Algorithm a : algorithms) {
        if (a == Algorithm::AllToAll) {
          rec.chosen.push_back(noiseless ? decideAllToAllNoiseless(z, local.environment, local.sensors).chosenHypothesis
                                         : decideAllToAll(z, local.environment, local.sensors, local.quad).chosenHypothesis);
        } else {
          rec.chosen.push_back(runLimited(z, noiseless, *graph, local));
        }
      }
    });

    for (std::size_t a = 0; a < algorithms.size(); ++a) {
      SweepRow row;
      row.sigma = channel.sigma;
      row.algorithm = algorithms[a];
      row.trials = scenario.trials;
      for (const TrialRecord& rec : outcomes) row.correct += rec.chosen[a] == rec.trueRegion ? 1 : 0;
      row.rate = static_cast<double>(row.correct) / static_cast<double>(row.trials);
      row.stderr_ = std::sqrt(row.rate * (1.0 - row.rate) / static_cast<double>(row.trials));
      result.rows.push_back(row);
    }
    if (records) records->insert(records->end(), outcomes.begin(), outcomes.end());
  }
  return result;
}

std::string formatSweepCsv(const SweepResult& result) {
  std::string out = std::string(kSweepCsvHeader) + "\n";
  for (const SweepRow& r : result.rows) {
    out += text::formatDouble(r.sigma) + "," + std::string(algorithmName(r.algorithm)) + "," +
           std::to_string(r.trials) + "," + std::to_string(r.correct) + "," + text::formatDouble(r.rate) + "," +
           text::formatDouble(r.stderr_) + "\n";
  }
  return out;
}

SweepResult parseSweepCsv(std::string_view csv) {
  SweepResult result;
  bool header = true;
  while (!csv.empty()) {
    const std::size_t eol = csv.find('\n');
    const std::string_view line = text::trim(csv.substr(0, eol));
    csv = eol == std::string_view::npos ? std::string_view{} : csv.substr(eol + 1);
    if (line.empty()) continue;
    if (header) {
      if (line != kSweepCsvHeader) throw ConfigError("sweep CSV: unexpected header");
      header = false;
      continue;
    }
    const auto f = text::split(line, ',');
    if (f.size() != 6) throw ConfigError("sweep CSV: expected 6 fields");
    SweepRow r;
    r.sigma = text::parseDouble(f[0]);
    r.algorithm = parseAlgorithm(f[1]);
    r.trials = text::parseInteger(f[2]);
    r.correct = text::parseInteger(f[3]);
    r.rate = text::parseDouble(f[4]);
    r.stderr_ = text::parseDouble(f[5]);
    result.rows.push_back(r);
  }
  if (header) throw ConfigError("sweep CSV: missing header");
  return result;
}

void exportResults(const SweepResult& result, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << formatSweepCsv(result);
  if (!out) throw ConfigError("failed writing " + path.string());
}

std::string formatPlotData(const SweepResult& result) {
  std::string out;
  for (Algorithm a : {Algorithm::AllToAll, Algorithm::LimitedVote}) {
    const auto rows = result.curve(a);
    if (rows.empty()) continue;
    if (!out.empty()) out += "\n\n";
    out += "# algorithm " + std::string(algorithmName(a)) + "\n# sigma rate stderr\n";
    for (const SweepRow& r : rows) {
      out += text::formatDouble(r.sigma) + " " + text::formatDouble(r.rate) + " " + text::formatDouble(r.stderr_) + "\n";
    }
  }
  return out;
}

std::vector<double> isotonicNonincreasing(std::span<const double> values, std::span<const double> weights) {
  if (values.size() != weights.size()) throw ConfigError("isotonic fit: size mismatch");
  struct Block {
    double mean;
    double weight;
    std::size_t count;
  };
  std::vector<Block> blocks;
  for (std::size_t i = 0; i < values.size(); ++i) {
    blocks.push_back({values[i], weights[i], 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean < blocks.back().mean) {
      const Block b = blocks.back();
      blocks.pop_back();
      Block& a = blocks.back();
      const double w = a.weight + b.weight;
      a.mean = w > 0.0 ? (a.mean * a.weight + b.mean * b.weight) / w : 0.5 * (a.mean + b.mean);
      a.weight = w;
      a.count += b.count;
    }
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (const Block& b : blocks) out.insert(out.end(), b.count, b.mean);
  return out;
}

}  // namespace regloc
