#pragma once

#include <cstddef>
#include <limits>
#include <span>

#include "regloc/geometry.hpp"

namespace regloc {

/// Controls for the adaptive triangle quadrature.
struct QuadratureSpec {
  int refinementDepth = 12;  ///< midpoint subdivisions allowed below an input triangle
  double relTol = 1e-4;      ///< stop once the estimated error is below relTol * integral
  /// Triangles whose log-integrand bound sits more than this many log units
  /// below the domain-wide peak contribute exactly zero. Infinity disables.
  double pruneLogUnits = 30.0;

  /// Throws ConfigError unless refinementDepth >= 0 and relTol > 0.
  void validate() const;
};

/// An integrand handled in log domain. logUpperBound must bound logValue from
/// above over the whole closed triangle; refinement relies on it to find mass
/// that the sample points miss.
class LogIntegrand {
 public:
  virtual ~LogIntegrand() = default;
  virtual double logValue(Point2 y) const = 0;
  virtual double logUpperBound(const Triangle& t) const = 0;
};

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double logAddExp(double a, double b);
double logSumExp(std::span<const double> values);

/// Seven-point, degree-5 symmetric rule. Returns ln of the integral over t.
double triangleLogQuadrature(const LogIntegrand& f, const Triangle& t);

struct LogIntegral {
  double logValue = kNegInf;
  double logError = kNegInf;  ///< ln of the summed error indicators
  std::size_t leaves = 0;
};

/// ln of the integral of exp(f) over the union of `triangles`.
///
/// Leaves are compared against their four midpoint children; where the
/// bound shows more than a few log units of variation the bound itself
/// becomes the error indicator. Each round refines the leaves carrying half
/// of the total indicated error. Leaves whose bound falls below `logFloor`
/// are dropped. Throws NumericError if the tolerance cannot be met within
/// the depth limit.
LogIntegral integrateLog(const LogIntegrand& f, std::span<const Triangle> triangles,
                         const QuadratureSpec& spec, double logFloor = kNegInf);

/// Largest attained value of f found by branch and bound; the result is a
/// sampled value, so it never exceeds the true maximum, and stops once no
/// remaining bound exceeds it by more than `tolerance`.
double peakLogValue(const LogIntegrand& f, std::span<const Triangle> triangles, double tolerance = 1.0);

}  // namespace regloc
