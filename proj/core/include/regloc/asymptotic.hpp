#pragma once

#include <array>
#include <span>
#include <vector>

#include "regloc/channel.hpp"
#include "regloc/geometry.hpp"

namespace regloc {

/// Inverts the noiseless channel: the distance r with meanLogPower(r) equal
/// to `logPower`, r = ((P / P_r - 1) d0)^(1/beta). Throws ConfigError when
/// logPower exceeds ln P.
double radiusFromPower(const ChannelParams& params, double logPower);

/// Zero-noise single-sensor posterior of one region: the received power pins
/// the source to a circle, and the region's share is proportional to the
/// angle the circle subtends inside it.
struct ArcPosterior {
  RegionId regionId = 0;
  double radius = 0.0;
  double theta = 0.0;  ///< radians in [0, 2 pi]
  /// (d0 + r^beta) * theta / (A * beta * r^(beta - 2)).
  double value = 0.0;
  /// Set for the containing region when r = 0, where the formula is singular.
  bool certain = false;
};

std::vector<ArcPosterior> arcPosteriors(const Environment& env, Point2 sensor, double logPower,
                                        const ChannelParams& params);

/// Region with the largest arc value (a certain entry wins), lowest id on
/// ties. Throws NumericError when every value is zero.
RegionId arcArgmax(std::span<const ArcPosterior> arcs);

/// Intersection points of two circles; equal when tangent. Throws
/// ConfigError for concentric centers or circles that do not meet.
std::array<Point2, 2> circleIntersections(Point2 c1, double r1, Point2 c2, double r2);

/// Zero-noise two-sensor localization over the Voronoi cells of x1 and x2:
/// the region of an intersection point of the two range circles lying in C.
RegionId twoSensorLocate(const Environment& env, Point2 x1, Point2 x2, double r1, double r2);

/// Least-squares position from exact ranges to three or more non-collinear
/// sensors. Throws NumericError when the geometry is degenerate.
Point2 trilaterate(std::span<const Point2> sensors, std::span<const double> radii);

}  // namespace regloc
