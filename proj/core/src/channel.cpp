#include "regloc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "regloc/errors.hpp"
#include "regloc/text.hpp"

namespace regloc {

void ChannelParams::validate() const {
  if (!(power > 0.0) || !std::isfinite(power)) throw ConfigError("channel: power must be > 0");
  if (!(d0 > 0.0) || !std::isfinite(d0)) throw ConfigError("channel: d0 must be > 0");
  if (!(beta > 2.0) || !std::isfinite(beta)) throw ConfigError("channel: beta must be > 2");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("channel: sigma must be >= 0");
}

double meanLogPowerAtDistance(const ChannelParams& params, double dist) {
  // ln(P d0 / (d0 + d^beta)) = ln P - ln(1 + d^beta / d0); exact ln P at d = 0.
  return std::log(params.power) - std::log1p(std::pow(dist, params.beta) / params.d0);
}

double meanLogPower(const ChannelParams& params, Point2 sensor, Point2 source) {
  return meanLogPowerAtDistance(params, distance(sensor, source));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RandomStream RandomStream::derive(std::uint64_t index) const {
  return RandomStream(splitmix64(seed_ ^ splitmix64(index)));
}

std::mt19937_64 RandomStream::engine(std::uint64_t index) const {
  return std::mt19937_64(derive(index).seed());
}

MeasurementVector sampleMeasurement(const ChannelParams& params, std::span<const Point2> sensors,
                                    Point2 source, int k, const RandomStream& stream,
                                    Aggregation aggregation) {
  params.validate();
  if (k < 1) throw ConfigError("sampleMeasurement: k must be >= 1");

  MeasurementVector z;
  z.k = k;
  z.effectiveSigma = params.sigma / std::sqrt(static_cast<double>(k));
  z.logPowers.reserve(sensors.size());
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    const double mean = meanLogPower(params, sensors[i], source);
    if (params.sigma == 0.0) {
      z.logPowers.push_back(mean);
      continue;
    }
    auto engine = stream.engine(i);
    std::normal_distribution<double> noise(0.0, params.sigma);
    if (aggregation == Aggregation::LogDomain) {
      double sum = 0.0;
      for (int l = 0; l < k; ++l) sum += noise(engine);
      z.logPowers.push_back(mean + sum / k);
    } else {
      // ln of the mean of exp(mean + n_l), kept in log domain.
      double shift = -std::numeric_limits<double>::infinity();
      std::vector<double> draws(static_cast<std::size_t>(k));
      for (double& d : draws) {
        d = noise(engine);
        shift = std::max(shift, d);
      }
      double acc = 0.0;
      for (double d : draws) acc += std::exp(d - shift);
      z.logPowers.push_back(mean + shift + std::log(acc / k));
    }
  }
  return z;
}

MeasurementVector noiselessMeasurement(const ChannelParams& params, std::span<const Point2> sensors,
                                       Point2 source, int k) {
  MeasurementVector z;
  z.k = k;
  z.effectiveSigma = params.sigma / std::sqrt(static_cast<double>(k));
  for (const Point2& s : sensors) z.logPowers.push_back(meanLogPower(params, s, source));
  return z;
}

std::string formatMeasurementRow(long long trial, const MeasurementVector& z) {
  std::string out = std::to_string(trial) + "," + std::to_string(z.k);
  for (double v : z.logPowers) {
    out += ',';
    out += text::formatDouble(v);
  }
  return out;
}

MeasurementRow parseMeasurementRow(std::string_view line, double sigma) {
  const auto fields = text::split(line, ',');
  if (fields.size() < 3) throw ConfigError("measurement row needs trial, k and at least one value");
  MeasurementRow row;
  row.trial = text::parseInteger(fields[0]);
  const long long k = text::parseInteger(fields[1]);
  if (k < 1) throw ConfigError("measurement row: k must be >= 1");
  row.z.k = static_cast<int>(k);
  row.z.effectiveSigma = sigma / std::sqrt(static_cast<double>(k));
  for (std::size_t i = 2; i < fields.size(); ++i) row.z.logPowers.push_back(text::parseDouble(fields[i]));
  return row;
}

}  // namespace regloc
