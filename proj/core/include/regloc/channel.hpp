#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "regloc/geometry.hpp"

namespace regloc {

/// Received power P*d0 / (d0 + |x - s|^beta) with Gaussian noise of standard
/// deviation `sigma` added to its logarithm.
struct ChannelParams {
  double power = 1.0;  ///< transmit power P, linear units
  double d0 = 1.0;     ///< nominal distance offset
  double beta = 3.0;   ///< path-loss exponent, > 2
  double sigma = 0.0;  ///< per-sample log-domain noise standard deviation

  /// Throws ConfigError unless P > 0, d0 > 0, beta > 2, sigma >= 0.
  void validate() const;
};

/// Sensor positions plus the channel they observe. Sensor i (1-based) is
/// positions[i-1] and, in partitioned scenarios, sits in region i.
struct SensorConfig {
  std::vector<Point2> positions;
  ChannelParams channel;

  std::size_t size() const { return positions.size(); }
  Point2 position(int sensorId) const { return positions.at(static_cast<std::size_t>(sensorId - 1)); }
};

/// 1-based sensor index.
using SensorId = int;

/// Noiseless ln(P_r) at a given sensor-source distance.
double meanLogPowerAtDistance(const ChannelParams& params, double dist);
double meanLogPower(const ChannelParams& params, Point2 sensor, Point2 source);

/// How k repeated samples are fused.
enum class Aggregation {
  LogDomain,  ///< mean of ln P_r(l); noise variance is exactly sigma^2 / k
  Linear,     ///< ln of the mean linear power
};

struct MeasurementVector {
  std::vector<double> logPowers;  ///< ln P_r per sensor, sensor i at index i-1
  int k = 1;
  double effectiveSigma = 0.0;  ///< sigma / sqrt(k)
};

/// Counter-based seed derivation. A stream is a 64-bit key; child streams and
/// engines are obtained by mixing the key with an index through splitmix64,
/// so the draws of (trial, sensor) never depend on evaluation order.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  RandomStream derive(std::uint64_t index) const;
  std::mt19937_64 engine(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Draws k noisy samples per sensor from the stream's engine(i - 1) for
/// sensor i and fuses them per `aggregation`. Throws ConfigError if k < 1.
MeasurementVector sampleMeasurement(const ChannelParams& params, std::span<const Point2> sensors,
                                    Point2 source, int k, const RandomStream& stream,
                                    Aggregation aggregation = Aggregation::LogDomain);

/// Noise-free measurement with the given effective sigma attached.
MeasurementVector noiselessMeasurement(const ChannelParams& params, std::span<const Point2> sensors,
                                       Point2 source, int k = 1);

/// CSV row `trial,k,lnP1,...,lnPN`.
std::string formatMeasurementRow(long long trial, const MeasurementVector& z);

struct MeasurementRow {
  long long trial = 0;
  MeasurementVector z;
};
/// Parses a row written by formatMeasurementRow; effectiveSigma = sigma/sqrt(k).
MeasurementRow parseMeasurementRow(std::string_view line, double sigma);

}  // namespace regloc
