#include "regloc/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "regloc/errors.hpp"

namespace regloc {

double HypothesisPosterior::logValueOf(RegionId id) const {
  for (std::size_t i = 0; i < hypothesisIds.size(); ++i) {
    if (hypothesisIds[i] == id) return logValues[i];
  }
  throw ConfigError("hypothesis " + std::to_string(id) + " not in posterior");
}

/// -sum_i (z_i - m_i(y))^2 / (2 sigma^2) over the selected sensors.
class PosteriorEvaluator::Likelihood final : public LogIntegrand {
 public:
  Likelihood(std::vector<Point2> sensors, std::vector<double> z, const ChannelParams& params,
             double sigma)
      : sensors_(std::move(sensors)),
        z_(std::move(z)),
        logPowerD0_(std::log(params.power) + std::log(params.d0)),
        d0_(params.d0),
        halfBeta_(0.5 * params.beta),
        scale_(1.0 / (2.0 * sigma * sigma)) {
    if (params.beta == 3.0) {
      power_ = PowerKind::Three;
    } else if (params.beta == 4.0) {
      power_ = PowerKind::Four;
    }
  }

  double logValue(Point2 y) const override {
    double acc = 0.0;
    for (std::size_t i = 0; i < sensors_.size(); ++i) {
      const double d2 = squaredDistance(sensors_[i], y);
      const double r = z_[i] - mean(distPowBeta(d2));
      acc += r * r;
    }
    return -acc * scale_;
  }

  double logUpperBound(const Triangle& t) const override {
    // The noiseless level falls monotonically with distance, so the exact
    // distance range over the triangle brackets each residual.
    double acc = 0.0;
    for (std::size_t i = 0; i < sensors_.size(); ++i) {
      const Point2 x = sensors_[i];
      const double near = triangleDistance(t, x);
      const double far2 = std::max({squaredDistance(x, t.a), squaredDistance(x, t.b), squaredDistance(x, t.c)});
      const double lo = z_[i] - mean(distPowBeta(near * near));
      const double hi = z_[i] - mean(distPowBeta(far2));
      if (lo > 0.0) {
        acc += lo * lo;
      } else if (hi < 0.0) {
        acc += hi * hi;
      }
    }
    return -acc * scale_;
  }

 private:
  enum class PowerKind { Three, Four, General };

  // |x - y|^beta from the squared distance; pow dominates the profile otherwise.
  double distPowBeta(double d2) const {
    switch (power_) {
      case PowerKind::Three:
        return d2 * std::sqrt(d2);
      case PowerKind::Four:
        return d2 * d2;
      case PowerKind::General:
        break;
    }
    return std::pow(d2, halfBeta_);
  }

  // ln(P d0) - ln(d0 + d^beta); absolute accuracy is what the residual needs.
  double mean(double dPowBeta) const { return logPowerD0_ - std::log(d0_ + dPowBeta); }

  std::vector<Point2> sensors_;
  std::vector<double> z_;
  double logPowerD0_;
  double d0_;
  double halfBeta_;
  double scale_;
  PowerKind power_ = PowerKind::General;
};

PosteriorEvaluator::PosteriorEvaluator(const MeasurementVector& z, std::vector<SensorId> sensorsUsed,
                                       const Environment& env, const SensorConfig& sensors,
                                       QuadratureSpec quad)
    : env_(env), quad_(quad), sensorsUsed_(std::move(sensorsUsed)) {
  quad_.validate();
  sensors.channel.validate();
  if (sensorsUsed_.empty()) throw ConfigError("posterior: no sensors selected");
  if (z.logPowers.size() != sensors.size()) {
    throw ConfigError("posterior: measurement vector length does not match sensor count");
  }
  if (!(z.effectiveSigma > 0.0)) {
    throw ConfigError("posterior: effective sigma must be > 0 (use the asymptotic oracles at zero noise)");
  }
  std::vector<Point2> positions;
  std::vector<double> values;
  for (SensorId id : sensorsUsed_) {
    if (id < 1 || static_cast<std::size_t>(id) > sensors.size()) {
      throw ConfigError("posterior: sensor id " + std::to_string(id) + " out of range");
    }
    positions.push_back(sensors.position(id));
    values.push_back(z.logPowers[static_cast<std::size_t>(id - 1)]);
  }
  const double sigma = z.effectiveSigma;
  likelihood_ = std::make_unique<Likelihood>(std::move(positions), std::move(values), sensors.channel, sigma);
  const double n = static_cast<double>(sensorsUsed_.size());
  logNormalizer_ = -0.5 * n * std::log(2.0 * std::numbers::pi * sigma * sigma) - std::log(env.totalArea());

  if (std::isfinite(quad_.pruneLogUnits)) {
    std::vector<Triangle> all;
    all.reserve(env.triangulation().size());
    for (const auto& tagged : env.triangulation()) all.push_back(tagged.triangle);
    logFloor_ = peakLogValue(*likelihood_, all) - quad_.pruneLogUnits;
  }
}

PosteriorEvaluator::~PosteriorEvaluator() = default;

double PosteriorEvaluator::integrate(std::span<const Triangle> triangles) const {
  const LogIntegral integral = integrateLog(*likelihood_, triangles, quad_, logFloor_);
  if (integral.logValue == kNegInf) return kNegInf;
  return integral.logValue + logNormalizer_;
}

double PosteriorEvaluator::regionLog(RegionId region) const {
  return integrate(env_.region(region).triangles());
}

double PosteriorEvaluator::complementLog(std::span<const RegionId> neighborhood) const {
  for (RegionId id : neighborhood) env_.region(id);  // validates ids
  std::vector<Triangle> rest;
  for (const auto& tagged : env_.triangulation()) {
    if (std::find(neighborhood.begin(), neighborhood.end(), tagged.region) == neighborhood.end()) {
      rest.push_back(tagged.triangle);
    }
  }
  if (rest.empty()) return kNegInf;
  return integrate(rest);
}

double PosteriorEvaluator::evidenceLog() const {
  std::vector<Triangle> all;
  all.reserve(env_.triangulation().size());
  for (const auto& tagged : env_.triangulation()) all.push_back(tagged.triangle);
  return integrate(all);
}

std::vector<SensorId> allSensors(std::size_t count) {
  std::vector<SensorId> ids(count);
  for (std::size_t i = 0; i < count; ++i) ids[i] = static_cast<SensorId>(i + 1);
  return ids;
}

double regionalLogDensity(const MeasurementVector& z, std::span<const SensorId> sensorsUsed,
                          RegionId region, const Environment& env, const SensorConfig& sensors,
                          const QuadratureSpec& quad) {
  const PosteriorEvaluator eval(z, {sensorsUsed.begin(), sensorsUsed.end()}, env, sensors, quad);
  return eval.regionLog(region);
}

HypothesisPosterior jointPosterior(const MeasurementVector& z, std::span<const SensorId> sensorsUsed,
                                   std::span<const RegionId> hypotheses, const Environment& env,
                                   const SensorConfig& sensors, const QuadratureSpec& quad) {
  const PosteriorEvaluator eval(z, {sensorsUsed.begin(), sensorsUsed.end()}, env, sensors, quad);
  HypothesisPosterior out;
  for (RegionId id : hypotheses) {
    out.hypothesisIds.push_back(id);
    out.logValues.push_back(eval.regionLog(id));
  }
  return out;
}

double complementPosterior(const MeasurementVector& z, std::span<const SensorId> sensorsUsed,
                           std::span<const RegionId> neighborhood, const Environment& env,
                           const SensorConfig& sensors, const QuadratureSpec& quad) {
  if (neighborhood.empty()) throw ConfigError("complementPosterior: empty neighborhood");
  const PosteriorEvaluator eval(z, {sensorsUsed.begin(), sensorsUsed.end()}, env, sensors, quad);
  return eval.complementLog(neighborhood);
}

double evidenceLogDensity(const MeasurementVector& z, std::span<const SensorId> sensorsUsed,
                          const Environment& env, const SensorConfig& sensors,
                          const QuadratureSpec& quad) {
  const PosteriorEvaluator eval(z, {sensorsUsed.begin(), sensorsUsed.end()}, env, sensors, quad);
  return eval.evidenceLog();
}

}  // namespace regloc
