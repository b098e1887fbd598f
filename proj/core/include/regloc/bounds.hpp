#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "regloc/channel.hpp"
#include "regloc/geometry.hpp"
#include "regloc/quadrature.hpp"

namespace regloc {

/// Standard Gaussian upper tail, Q(x) = P[N(0,1) > x].
double qFunction(double x);

/// Separation of a wrong region from the source, seen through the sensors.
///   a_i(y) = ln((d0 + |y - x_i|^beta) / (d0 + |s - x_i|^beta))
///   U >= max over y in W, i of |a_i(y)|
///   L <= min over y in W of sum_i a_i(y)^2
///   eta = sqrt(U^2 + L / (alpha N)) - U
struct RegionBounds {
  RegionId regionId = 0;
  double U = 0.0;
  double L = 0.0;
  double eta = 0.0;
  double alpha = 2.0;
  std::size_t sensorCount = 0;
  bool sourceInside = false;  ///< L and eta are 0 by definition
  Point2 minimizer;           ///< where the incumbent L was found
};

/// U is exact: every |a_i| is monotone in |y - x_i|, so its maximum over W
/// sits at the nearest or farthest point of W from x_i. L comes from a
/// 200 x 200 grid plus boundary samples, refined three times by 10x around
/// the incumbent. Throws ConfigError if alpha <= 1.
RegionBounds computeRegionBounds(const PolygonRegion& region, std::span<const Point2> sensors,
                                 Point2 source, const ChannelParams& params, double alpha = 2.0);

/// a_i(y) for every sensor.
std::vector<double> logRatios(std::span<const Point2> sensors, Point2 source, Point2 y,
                              const ChannelParams& params);

/// Points of a `resolution` x `resolution` grid over the region's bounding
/// box that fall in the closed region, followed by `resolution` samples per edge.
std::vector<Point2> regionGrid(const PolygonRegion& region, int resolution = 200);

/// Stable form of sqrt(U^2 + L/(alpha N)) - U.
double etaFromBounds(double U, double L, double alpha, std::size_t sensorCount);

/// ln epsilon_j = ln A_j - L_j / (4 sigma^2) - ln A - (N/2) ln(2 pi sigma^2).
double logEpsilon(double regionArea, double totalArea, double L, double sigma, std::size_t sensorCount);

struct MuValue {
  double value = 0.0;     ///< (1 - 2 Q(eta/sigma))^N clamped to [0, 1]
  bool vacuous = false;   ///< the base was not positive, so the bound says nothing
};
MuValue muBound(double eta, double sigma, std::size_t sensorCount);

/// One row per (sigma, region). Wrong regions carry the elimination check,
/// the source region the positivity check.
struct TheoremRow {
  enum class Role { Wrong, Correct };

  double sigma = 0.0;
  RegionId region = 0;
  Role role = Role::Wrong;
  double logEpsilon = kNegInf;  ///< wrong rows
  double mu = 0.0;              ///< wrong rows
  bool vacuous = false;
  double psi = 0.0;    ///< correct rows: mean over trials of p(z) - sum of epsilon_j
  double omega = 0.0;  ///< correct rows: product of the mu_j
  std::size_t trials = 0;
  std::size_t hits = 0;  ///< trials where the event held
  double frequency = 0.0;
  double stderr_ = 0.0;

  /// Lower edge the frequency must clear: bound - 3 standard errors.
  double threshold() const { return (role == Role::Wrong ? mu : omega) - 3.0 * stderr_; }
  bool holds() const { return frequency >= threshold(); }
};

struct TheoremReport {
  std::vector<RegionBounds> bounds;  ///< one per region, the source region included
  std::vector<TheoremRow> rows;
  /// Largest |p(z) - sum_j p(z|H_j)P(H_j)| / p(z) seen over all trials.
  double maxIdentityError = 0.0;
};

struct TheoremSetup {
  const Environment* env = nullptr;
  std::vector<Point2> sensors;
  ChannelParams channel;  ///< sigma is taken from the grid
  Point2 source;
  double alpha = 2.0;
  int k = 1;
  QuadratureSpec quad;
};

/// Monte Carlo check of the wrong-region and correct-region bounds. For each
/// sigma and trial a measurement is drawn from
/// RandomStream(seed).derive(sigmaIndex).derive(trial) and the posterior of
/// every region is computed without pruning.
TheoremReport theoremChecks(const TheoremSetup& setup, std::span<const double> sigmaGrid,
                            std::size_t trials, std::uint64_t seed, unsigned workers = 1);

/// Rows of the given role only.
std::vector<TheoremRow> theoremOneCheck(const TheoremSetup& setup, std::span<const double> sigmaGrid,
                                        std::size_t trials, std::uint64_t seed, unsigned workers = 1);
std::vector<TheoremRow> theoremTwoCheck(const TheoremSetup& setup, std::span<const double> sigmaGrid,
                                        std::size_t trials, std::uint64_t seed, unsigned workers = 1);

inline constexpr const char* kTheoremCsvHeader =
    "sigma,region,role,epsilon,log_epsilon,mu,vacuous,psi,omega,trials,hits,frequency,stderr";
std::string formatTheoremRow(const TheoremRow& row);

}  // namespace regloc
