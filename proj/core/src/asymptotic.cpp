#include "regloc/asymptotic.hpp"

#include <cmath>
#include <numbers>
#include <optional>

#include "regloc/errors.hpp"
#include "regloc/text.hpp"

namespace regloc {

double radiusFromPower(const ChannelParams& params, double logPower) {
  const double excess = std::log(params.power) - logPower;
  if (!(excess >= 0.0)) {
    throw ConfigError("radiusFromPower: ln P_r = " + text::formatDouble(logPower) +
                      " exceeds ln P; not a noiseless reading");
  }
  // P / P_r - 1 = expm1(ln P - ln P_r)
  return std::pow(std::expm1(excess) * params.d0, 1.0 / params.beta);
}

std::vector<ArcPosterior> arcPosteriors(const Environment& env, Point2 sensor, double logPower,
                                        const ChannelParams& params) {
  const double r = radiusFromPower(params, logPower);
  std::vector<ArcPosterior> out;
  out.reserve(env.size());
  if (r == 0.0) {
    const RegionId home = containingRegion(env, sensor);
    for (const auto& region : env.regions()) {
      ArcPosterior arc;
      arc.regionId = region.id();
      arc.certain = region.id() == home;
      arc.theta = arc.certain ? 2.0 * std::numbers::pi : 0.0;
      out.push_back(arc);
    }
    return out;
  }
  const double scale = (params.d0 + std::pow(r, params.beta)) /
                       (env.totalArea() * params.beta * std::pow(r, params.beta - 2.0));
  for (const auto& region : env.regions()) {
    ArcPosterior arc;
    arc.regionId = region.id();
    arc.radius = r;
    arc.theta = subtendedAngle(region, sensor, r);
    arc.value = scale * arc.theta;
    out.push_back(arc);
  }
  return out;
}

RegionId arcArgmax(std::span<const ArcPosterior> arcs) {
  for (const ArcPosterior& a : arcs) {
    if (a.certain) return a.regionId;
  }
  const ArcPosterior* best = nullptr;
  for (const ArcPosterior& a : arcs) {
    if (a.value <= 0.0) continue;
    if (!best || a.value > best->value || (a.value == best->value && a.regionId < best->regionId)) best = &a;
  }
  if (!best) throw NumericError("arc posterior: the range circle misses every region");
  return best->regionId;
}

std::array<Point2, 2> circleIntersections(Point2 c1, double r1, Point2 c2, double r2) {
  const double d = distance(c1, c2);
  if (d == 0.0) throw ConfigError("circle intersection: concentric circles");
  const double tol = 1e-12 * std::max({d, r1, r2});
  if (d > r1 + r2 + tol || d < std::abs(r1 - r2) - tol) {
    throw ConfigError("circle intersection: circles do not meet (inconsistent ranges)");
  }
  const double a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
  const double h = std::sqrt(std::max(0.0, r1 * r1 - a * a));
  const Point2 u = (1.0 / d) * (c2 - c1);
  const Point2 base = c1 + a * u;
  const Point2 perp{-u.y, u.x};
  return {base + h * perp, base - h * perp};
}

namespace {

std::optional<RegionId> regionIfInside(const Environment& env, Point2 p) {
  const double tol = env.tolerance();
  for (const auto& r : env.regions()) {
    if (r.locate(p, tol) != Location::Outside) return r.id();
  }
  return std::nullopt;
}

}  // namespace

RegionId twoSensorLocate(const Environment& env, Point2 x1, Point2 x2, double r1, double r2) {
  const auto points = circleIntersections(x1, r1, x2, r2);
  for (const Point2& p : points) {
    if (auto id = regionIfInside(env, p)) return *id;
  }
  throw ConfigError("twoSensorLocate: no intersection point lies in the environment");
}

Point2 trilaterate(std::span<const Point2> sensors, std::span<const double> radii) {
  if (sensors.size() != radii.size() || sensors.size() < 3) {
    throw NumericError("trilaterate: needs three or more sensors with ranges");
  }
  const double n = static_cast<double>(sensors.size());
  Point2 mean;
  double meanSq = 0.0;
  double meanR2 = 0.0;
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    mean = mean + (1.0 / n) * sensors[i];
    meanR2 += radii[i] * radii[i] / n;
  }
  for (const Point2& x : sensors) meanSq += squaredDistance(x, mean) / n;
  // Centered circle equations: 2 (x_i - m) . (p - m) = |x_i - m|^2 - mean|x - m|^2 - r_i^2 + mean r^2.
  double a11 = 0.0, a12 = 0.0, a22 = 0.0, b1 = 0.0, b2 = 0.0;
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    const Point2 g = 2.0 * (sensors[i] - mean);
    const double rhs = squaredDistance(sensors[i], mean) - meanSq - radii[i] * radii[i] + meanR2;
    a11 += g.x * g.x;
    a12 += g.x * g.y;
    a22 += g.y * g.y;
    b1 += g.x * rhs;
    b2 += g.y * rhs;
  }
  const double det = a11 * a22 - a12 * a12;
  if (!(std::abs(det) > 1e-12 * (a11 * a22 + a12 * a12))) {
    throw NumericError("trilaterate: sensors are collinear");
  }
  return {mean.x + (a22 * b1 - a12 * b2) / det, mean.y + (a11 * b2 - a12 * b1) / det};
}

}  // namespace regloc
