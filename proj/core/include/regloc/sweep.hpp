#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "regloc/scenario.hpp"

namespace regloc {

enum class Algorithm {
  AllToAll,     ///< "a2a"
  LimitedVote,  ///< "limited": every sensor decides over its neighborhood, then a majority vote
};
std::string_view algorithmName(Algorithm a);
/// Accepts "a2a" and "limited". Throws ConfigError otherwise.
Algorithm parseAlgorithm(std::string_view name);

struct SweepRow {
  double sigma = 0.0;
  Algorithm algorithm = Algorithm::AllToAll;
  long long trials = 0;
  long long correct = 0;
  double rate = 0.0;
  double stderr_ = 0.0;  ///< sqrt(rate (1 - rate) / trials)

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepResult {
  std::vector<SweepRow> rows;  ///< sigma-major, algorithms in request order
  std::vector<std::string> warnings;

  /// Rows of one algorithm in sigma order.
  std::vector<SweepRow> curve(Algorithm a) const;
};

/// One trial's outcome, for decision dumps.
struct TrialRecord {
  std::size_t sigmaIndex = 0;
  long long trial = 0;
  Point2 source;
  RegionId trueRegion = 0;
  std::vector<RegionId> chosen;  ///< per requested algorithm; 0 is an abstention
};

/// Monte Carlo sweep over the scenario's sigma grid. Trial t at grid index g
/// draws everything from RandomStream(seed).derive(g).derive(t): the source
/// from lane 0 and the noise from lane 1. Sigma 0 uses the noiseless
/// decisions. The result does not depend on `workers` (0 picks the core count).
SweepResult runSweep(const Scenario& scenario, std::span<const Algorithm> algorithms, unsigned workers = 1,
                     std::vector<TrialRecord>* records = nullptr);

inline constexpr const char* kSweepCsvHeader = "sigma,algorithm,trials,correct,rate,stderr";
std::string formatSweepCsv(const SweepResult& result);
SweepResult parseSweepCsv(std::string_view csv);
/// Writes formatSweepCsv to `path`. Throws ConfigError when unwritable.
void exportResults(const SweepResult& result, const std::filesystem::path& path);

/// gnuplot layout: one `# algorithm` block per algorithm with `sigma rate
/// stderr` columns, blocks separated by two blank lines (use `index`).
std::string formatPlotData(const SweepResult& result);

/// Weighted least-squares nonincreasing fit (pool adjacent violators).
std::vector<double> isotonicNonincreasing(std::span<const double> values, std::span<const double> weights);

}  // namespace regloc
