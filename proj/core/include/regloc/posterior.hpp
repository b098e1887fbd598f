#pragma once

#include <memory>
#include <span>
#include <vector>

#include "regloc/channel.hpp"
#include "regloc/geometry.hpp"
#include "regloc/quadrature.hpp"

namespace regloc {

/// ln[p(z | H_j) P(H_j)] per hypothesis, unnormalized. Entries are finite or
/// -infinity.
struct HypothesisPosterior {
  std::vector<RegionId> hypothesisIds;
  std::vector<double> logValues;

  std::size_t size() const { return logValues.size(); }
  /// Throws ConfigError when the id is not present.
  double logValueOf(RegionId id) const;
};

/// Regional conditional densities for one measurement vector and one subset
/// of sensors. The global peak of the log-likelihood over the environment is
/// located once and shared by every region, complement and evidence query.
class PosteriorEvaluator {
 public:
  /// Throws ConfigError for an empty or out-of-range sensor subset, a
  /// measurement vector of the wrong length, or effectiveSigma <= 0.
  PosteriorEvaluator(const MeasurementVector& z, std::vector<SensorId> sensorsUsed,
                     const Environment& env, const SensorConfig& sensors, QuadratureSpec quad);
  ~PosteriorEvaluator();
  PosteriorEvaluator(const PosteriorEvaluator&) = delete;
  PosteriorEvaluator& operator=(const PosteriorEvaluator&) = delete;

  /// ln[(1/A) * integral over W_j of p(z | y) dy].
  double regionLog(RegionId region) const;
  /// Same integral over C minus the listed regions; -infinity when empty.
  double complementLog(std::span<const RegionId> neighborhood) const;
  /// ln p(z), integrated over all of C in one adaptive pass.
  double evidenceLog() const;

  /// ln[(2 pi sigma^2)^(-n/2) / A], the constant outside every integral.
  double logNormalizer() const { return logNormalizer_; }
  std::span<const SensorId> sensorsUsed() const { return sensorsUsed_; }

 private:
  class Likelihood;

  double integrate(std::span<const Triangle> triangles) const;

  const Environment& env_;
  QuadratureSpec quad_;
  std::vector<SensorId> sensorsUsed_;
  std::unique_ptr<Likelihood> likelihood_;
  double logNormalizer_ = 0.0;
  double logFloor_ = kNegInf;
};

std::vector<SensorId> allSensors(std::size_t count);

double regionalLogDensity(const MeasurementVector& z, std::span<const SensorId> sensorsUsed,
                          RegionId region, const Environment& env, const SensorConfig& sensors,
                          const QuadratureSpec& quad);

HypothesisPosterior jointPosterior(const MeasurementVector& z, std::span<const SensorId> sensorsUsed,
                                   std::span<const RegionId> hypotheses, const Environment& env,
                                   const SensorConfig& sensors, const QuadratureSpec& quad);

/// ln[p(z | H_0) P(H_0)] for the complement of `neighborhood`, by direct
/// quadrature over the complement regions.
double complementPosterior(const MeasurementVector& z, std::span<const SensorId> sensorsUsed,
                           std::span<const RegionId> neighborhood, const Environment& env,
                           const SensorConfig& sensors, const QuadratureSpec& quad);

double evidenceLogDensity(const MeasurementVector& z, std::span<const SensorId> sensorsUsed,
                          const Environment& env, const SensorConfig& sensors,
                          const QuadratureSpec& quad);

}  // namespace regloc
