#include "regloc/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>
#include <string>

#include "regloc/errors.hpp"
#include "regloc/text.hpp"

namespace regloc {

namespace {

double signedArea(std::span<const Point2> v) {
  double twice = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2& a = v[i];
    const Point2& b = v[(i + 1) % v.size()];
    twice += cross(a, b);
  }
  return 0.5 * twice;
}

Point2 polygonCentroid(std::span<const Point2> v, double area) {
  // Shift to the first vertex to keep the products small.
  const Point2 o = v[0];
  double cx = 0.0;
  double cy = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2 a = v[i] - o;
    const Point2 b = v[(i + 1) % v.size()] - o;
    const double w = cross(a, b);
    cx += (a.x + b.x) * w;
    cy += (a.y + b.y) * w;
  }
  return {o.x + cx / (6.0 * area), o.y + cy / (6.0 * area)};
}

double orient(Point2 a, Point2 b, Point2 c) { return cross(b - a, c - a); }

bool onSegment(Point2 p, Point2 a, Point2 b) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

int sign(double v) { return (v > 0) - (v < 0); }

// Closed-segment intersection, exact-predicate style (touching counts).
bool segmentsIntersect(Point2 p1, Point2 p2, Point2 q1, Point2 q2) {
  const int o1 = sign(orient(p1, p2, q1));
  const int o2 = sign(orient(p1, p2, q2));
  const int o3 = sign(orient(q1, q2, p1));
  const int o4 = sign(orient(q1, q2, p2));
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && onSegment(q1, p1, p2)) return true;
  if (o2 == 0 && onSegment(q2, p1, p2)) return true;
  if (o3 == 0 && onSegment(p1, q1, q2)) return true;
  if (o4 == 0 && onSegment(p2, q1, q2)) return true;
  return false;
}

// Interiors cross transversally; near-degenerate configurations do not count.
bool segmentsCrossProperly(Point2 p1, Point2 p2, Point2 q1, Point2 q2, double areaTol) {
  const double o1 = orient(p1, p2, q1);
  const double o2 = orient(p1, p2, q2);
  const double o3 = orient(q1, q2, p1);
  const double o4 = orient(q1, q2, p2);
  auto strict = [areaTol](double o) { return std::abs(o) > areaTol; };
  return strict(o1) && strict(o2) && strict(o3) && strict(o4) && (o1 > 0) != (o2 > 0) &&
         (o3 > 0) != (o4 > 0);
}

bool isSimple(std::span<const Point2> v) {
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = v[i];
    const Point2 b = v[(i + 1) % n];
    const Point2 c = v[(i + 2) % n];
    // Adjacent edges folding back onto each other.
    if (orient(a, b, c) == 0.0 && dot(b - a, c - b) < 0.0) return false;
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent through the closing edge
      if (segmentsIntersect(a, b, v[j], v[(j + 1) % n])) return false;
    }
  }
  return true;
}

bool boxesOverlap(const BoundingBox& a, const BoundingBox& b, double tol) {
  return a.lo.x <= b.hi.x + tol && b.lo.x <= a.hi.x + tol && a.lo.y <= b.hi.y + tol &&
         b.lo.y <= a.hi.y + tol;
}

bool pointInTriangleInclusive(Point2 p, Point2 a, Point2 b, Point2 c, double eps) {
  return orient(a, b, p) >= -eps && orient(b, c, p) >= -eps && orient(c, a, p) >= -eps;
}

bool interiorsOverlap(const PolygonRegion& a, const PolygonRegion& b, double tol) {
  if (!boxesOverlap(a.bounds(), b.bounds(), -tol)) return false;
  const auto va = a.vertices();
  const auto vb = b.vertices();
  const double areaTol = tol * std::max(a.bounds().scale(), b.bounds().scale());
  for (std::size_t i = 0; i < va.size(); ++i) {
    for (std::size_t j = 0; j < vb.size(); ++j) {
      if (segmentsCrossProperly(va[i], va[(i + 1) % va.size()], vb[j], vb[(j + 1) % vb.size()],
                                areaTol)) {
        return true;
      }
    }
  }
  for (const Point2& p : va) {
    if (b.locate(p, tol) == Location::Inside) return true;
  }
  for (const Point2& p : vb) {
    if (a.locate(p, tol) == Location::Inside) return true;
  }
  for (const Triangle& t : a.triangles()) {
    if (b.locate(t.centroid(), tol) == Location::Inside) return true;
  }
  for (const Triangle& t : b.triangles()) {
    if (a.locate(t.centroid(), tol) == Location::Inside) return true;
  }
  return false;
}

// True when the boundaries share a segment of positive length.
bool shareEdge(const PolygonRegion& a, const PolygonRegion& b, double tol) {
  if (!boxesOverlap(a.bounds(), b.bounds(), tol)) return false;
  const auto va = a.vertices();
  const auto vb = b.vertices();
  for (std::size_t i = 0; i < va.size(); ++i) {
    const Point2 p = va[i];
    const Point2 q = va[(i + 1) % va.size()];
    const double len = distance(p, q);
    if (len <= tol) continue;
    const Point2 dir = (1.0 / len) * (q - p);
    for (std::size_t j = 0; j < vb.size(); ++j) {
      const Point2 r = vb[j];
      const Point2 s = vb[(j + 1) % vb.size()];
      if (std::abs(cross(dir, r - p)) > 10 * tol || std::abs(cross(dir, s - p)) > 10 * tol) continue;
      const double t0 = dot(r - p, dir);
      const double t1 = dot(s - p, dir);
      const double lo = std::max(0.0, std::min(t0, t1));
      const double hi = std::min(len, std::max(t0, t1));
      if (hi - lo > 10 * tol) return true;
    }
  }
  return false;
}

std::vector<Point2> dropNearDuplicates(std::vector<Point2> v, double tol) {
  std::vector<Point2> out;
  out.reserve(v.size());
  for (const Point2& p : v) {
    if (out.empty() || distance(out.back(), p) > tol) out.push_back(p);
  }
  while (out.size() > 1 && distance(out.front(), out.back()) <= tol) out.pop_back();
  return out;
}

// Keeps the part of a convex polygon where dot(normal, p) <= offset.
std::vector<Point2> clipHalfPlane(const std::vector<Point2>& poly, Point2 normal, double offset) {
  std::vector<Point2> out;
  out.reserve(poly.size() + 1);
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point2 a = poly[i];
    const Point2 b = poly[(i + 1) % poly.size()];
    const double fa = dot(normal, a) - offset;
    const double fb = dot(normal, b) - offset;
    if (fa <= 0.0) out.push_back(a);
    if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)) {
      const double t = fa / (fa - fb);
      out.push_back(a + t * (b - a));
    }
  }
  return out;
}

}  // namespace

BoundingBox boundsOf(std::span<const Point2> points) {
  BoundingBox box{{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()},
                  {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()}};
  for (const Point2& p : points) {
    box.lo.x = std::min(box.lo.x, p.x);
    box.lo.y = std::min(box.lo.y, p.y);
    box.hi.x = std::max(box.hi.x, p.x);
    box.hi.y = std::max(box.hi.y, p.y);
  }
  return box;
}

double segmentDistance(Point2 p, Point2 a, Point2 b) {
  const Point2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + t * ab);
}

double triangleDistance(const Triangle& t, Point2 p) {
  const double o1 = orient(t.a, t.b, p);
  const double o2 = orient(t.b, t.c, p);
  const double o3 = orient(t.c, t.a, p);
  const bool hasNeg = o1 < 0 || o2 < 0 || o3 < 0;
  const bool hasPos = o1 > 0 || o2 > 0 || o3 > 0;
  if (!(hasNeg && hasPos)) return 0.0;
  return std::min({segmentDistance(p, t.a, t.b), segmentDistance(p, t.b, t.c),
                   segmentDistance(p, t.c, t.a)});
}

// ---------------------------------------------------------------------------
// PolygonRegion

PolygonRegion::PolygonRegion(RegionId id, std::vector<Point2> vertices) : id_(id) {
  for (const Point2& p : vertices) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw ConfigError("region " + std::to_string(id) + ": non-finite vertex");
    }
  }
  std::vector<Point2> cleaned;
  cleaned.reserve(vertices.size());
  for (const Point2& p : vertices) {
    if (cleaned.empty() || !(cleaned.back() == p)) cleaned.push_back(p);
  }
  while (cleaned.size() > 1 && cleaned.front() == cleaned.back()) cleaned.pop_back();
  if (cleaned.size() < 3) {
    throw ConfigError("region " + std::to_string(id) + ": needs at least 3 distinct vertices");
  }

  double area = signedArea(cleaned);
  if (area < 0.0) {
    std::reverse(cleaned.begin(), cleaned.end());
    area = -area;
  }
  bounds_ = boundsOf(cleaned);
  const double scale = bounds_.scale();
  if (!(area > 1e-14 * scale * scale)) {
    throw ConfigError("region " + std::to_string(id) + ": zero area");
  }
  if (!isSimple(cleaned)) {
    throw ConfigError("region " + std::to_string(id) + ": polygon is not simple");
  }
  vertices_ = std::move(cleaned);
  area_ = area;
  centroid_ = polygonCentroid(vertices_, area_);
  triangles_ = earClip(vertices_);
}

bool PolygonRegion::isConvex() const {
  const double eps = 1e-12 * bounds_.scale() * bounds_.scale();
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (orient(vertices_[i], vertices_[(i + 1) % n], vertices_[(i + 2) % n]) < -eps) return false;
  }
  return true;
}

Location PolygonRegion::locate(Point2 p, double tol) const {
  if (p.x < bounds_.lo.x - tol || p.x > bounds_.hi.x + tol || p.y < bounds_.lo.y - tol ||
      p.y > bounds_.hi.y + tol) {
    return Location::Outside;
  }
  const std::size_t n = vertices_.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2 a = vertices_[j];
    const Point2 b = vertices_[i];
    if (segmentDistance(p, a, b) <= tol) return Location::Boundary;
    if ((b.y > p.y) != (a.y > p.y)) {
      const double xCross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < xCross) inside = !inside;
    }
  }
  return inside ? Location::Inside : Location::Outside;
}

// ---------------------------------------------------------------------------
// Ear clipping

std::vector<Triangle> earClip(std::span<const Point2> ccwVertices) {
  std::vector<Point2> v(ccwVertices.begin(), ccwVertices.end());
  const double scale = boundsOf(v).scale();
  const double eps = 1e-14 * scale * scale;

  // Straight-through vertices add nothing but sliver ears.
  bool removed = true;
  while (removed && v.size() > 3) {
    removed = false;
    for (std::size_t i = 0; i < v.size() && v.size() > 3; ++i) {
      const Point2 a = v[(i + v.size() - 1) % v.size()];
      const Point2 b = v[i];
      const Point2 c = v[(i + 1) % v.size()];
      if (std::abs(orient(a, b, c)) <= eps && dot(b - a, c - b) > 0.0) {
        v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
        removed = true;
      }
    }
  }

  std::vector<Triangle> out;
  out.reserve(v.size());
  while (v.size() > 3) {
    const std::size_t n = v.size();
    std::size_t best = n;
    double bestQuality = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Point2 a = v[(i + n - 1) % n];
      const Point2 b = v[i];
      const Point2 c = v[(i + 1) % n];
      const double o = orient(a, b, c);
      if (o <= eps) continue;
      bool empty = true;
      for (std::size_t k = 0; k < n && empty; ++k) {
        const Point2 q = v[k];
        if (q == a || q == b || q == c) continue;
        if (pointInTriangleInclusive(q, a, b, c, eps)) empty = false;
      }
      if (!empty) continue;
      // Prefer well-shaped ears: area over squared longest edge.
      const double longest =
          std::max({squaredDistance(a, b), squaredDistance(b, c), squaredDistance(c, a)});
      const double quality = o / longest;
      if (quality > bestQuality) {
        bestQuality = quality;
        best = i;
      }
    }
    if (best == n) {
      // Numerically stuck; clip the most convex corner.
      double most = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        const double o = orient(v[(i + n - 1) % n], v[i], v[(i + 1) % n]);
        if (o > most) {
          most = o;
          best = i;
        }
      }
    }
    out.push_back({v[(best + n - 1) % n], v[best], v[(best + 1) % n]});
    v.erase(v.begin() + static_cast<std::ptrdiff_t>(best));
  }
  out.push_back({v[0], v[1], v[2]});
  return out;
}

// ---------------------------------------------------------------------------
// Environment

Environment::Environment(std::vector<PolygonRegion> regions) : regions_(std::move(regions)) {
  if (regions_.empty()) throw ConfigError("environment has no regions");
  std::sort(regions_.begin(), regions_.end(),
            [](const PolygonRegion& a, const PolygonRegion& b) { return a.id() < b.id(); });
  for (std::size_t i = 0; i < regions_.size(); ++i) {
    if (regions_[i].id() != static_cast<RegionId>(i + 1)) {
      throw ConfigError("region ids must be exactly 1..N");
    }
  }

  std::vector<Point2> all;
  for (const auto& r : regions_) {
    totalArea_ += r.area();
    all.insert(all.end(), r.vertices().begin(), r.vertices().end());
    for (const Triangle& t : r.triangles()) triangulation_.push_back({t, r.id()});
  }
  bounds_ = boundsOf(all);
  const double tol = tolerance();

  const std::size_t n = regions_.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (interiorsOverlap(regions_[i], regions_[j], tol)) {
        throw ConfigError("regions " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                          " overlap");
      }
    }
  }

  std::vector<bool> seen(n, false);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = true;
  while (!frontier.empty()) {
    const std::size_t i = frontier.front();
    frontier.pop();
    for (std::size_t j = 0; j < n; ++j) {
      if (!seen[j] && shareEdge(regions_[i], regions_[j], tol)) {
        seen[j] = true;
        frontier.push(j);
      }
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw ConfigError("environment is not connected through shared edges");
  }
}

const PolygonRegion& Environment::region(RegionId id) const {
  if (id < 1 || static_cast<std::size_t>(id) > regions_.size()) {
    throw ConfigError("no region with id " + std::to_string(id));
  }
  return regions_[static_cast<std::size_t>(id - 1)];
}

std::vector<RegionId> Environment::ids() const {
  std::vector<RegionId> out;
  out.reserve(regions_.size());
  for (const auto& r : regions_) out.push_back(r.id());
  return out;
}

// ---------------------------------------------------------------------------
// Operations

Environment voronoiPartition(std::span<const Point2> sites, const PolygonRegion& boundary) {
  if (sites.empty()) throw ConfigError("voronoi: no sites");
  if (!boundary.isConvex()) throw ConfigError("voronoi: boundary must be convex");
  const double tol = boundary.tolerance();
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (boundary.locate(sites[i], tol) != Location::Inside) {
      throw ConfigError("voronoi: site " + std::to_string(i + 1) +
                        " is not strictly inside the boundary");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (distance(sites[i], sites[j]) <= tol) {
        throw ConfigError("voronoi: duplicate sites " + std::to_string(j + 1) + " and " +
                          std::to_string(i + 1));
      }
    }
  }

  const std::vector<Point2> outline(boundary.vertices().begin(), boundary.vertices().end());
  std::vector<PolygonRegion> cells;
  cells.reserve(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i) {
    std::vector<Point2> cell = outline;
    for (std::size_t j = 0; j < sites.size() && cell.size() >= 3; ++j) {
      if (j == i) continue;
      const Point2 normal = sites[j] - sites[i];
      const double offset = dot(normal, midpoint(sites[i], sites[j]));
      cell = dropNearDuplicates(clipHalfPlane(cell, normal, offset), 1e-12 * boundary.bounds().scale());
    }
    cells.emplace_back(static_cast<RegionId>(i + 1), std::move(cell));
  }
  return Environment(std::move(cells));
}

RegionId containingRegion(const Environment& env, Point2 p) {
  const double tol = env.tolerance();
  for (const auto& r : env.regions()) {
    if (r.locate(p, tol) != Location::Outside) return r.id();
  }
  throw ConfigError("point (" + text::formatDouble(p.x) + ", " + text::formatDouble(p.y) +
                    ") lies outside the environment");
}

double subtendedAngle(const PolygonRegion& region, Point2 center, double radius) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  constexpr double kAngularTol = 1e-12;
  if (!(radius >= 0.0)) throw ConfigError("subtendedAngle: negative radius");
  if (radius == 0.0) {
    return region.locate(center, 0.0) == Location::Inside ? kTwoPi : 0.0;
  }

  std::vector<double> angles;
  const auto v = region.vertices();
  const double r2 = radius * radius;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2 a = v[i];
    const Point2 e = v[(i + 1) % v.size()] - a;
    const Point2 f = a - center;
    const double qa = dot(e, e);
    const double qb = dot(e, f);
    const double qc = dot(f, f) - r2;
    const double disc = qb * qb - qa * qc;
    if (disc < 0.0) continue;
    const double root = std::sqrt(disc);
    // Stable pair of roots of qa t^2 + 2 qb t + qc = 0.
    const double q = qb >= 0.0 ? -(qb + root) : -(qb - root);
    double ts[2] = {q / qa, q != 0.0 ? qc / q : -qb / qa};
    for (double t : ts) {
      if (t < 0.0 || t > 1.0) continue;
      const Point2 hit = a + t * e;
      double ang = std::atan2(hit.y - center.y, hit.x - center.x);
      if (ang < 0.0) ang += kTwoPi;
      angles.push_back(ang);
    }
  }

  auto membership = [&](double ang) {
    const Point2 p{center.x + radius * std::cos(ang), center.y + radius * std::sin(ang)};
    return region.locate(p, 0.0) != Location::Outside;
  };

  if (angles.empty()) return membership(0.0) ? kTwoPi : 0.0;

  std::sort(angles.begin(), angles.end());
  double total = 0.0;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const double start = angles[i];
    const double end = i + 1 < angles.size() ? angles[i + 1] : angles[0] + kTwoPi;
    const double span = end - start;
    if (span < kAngularTol) continue;
    if (membership(start + 0.5 * span)) total += span;
  }
  return std::min(total, kTwoPi);
}

double regionDistance(const PolygonRegion& region, Point2 p) {
  if (region.locate(p, 0.0) != Location::Outside) return 0.0;
  const auto v = region.vertices();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    best = std::min(best, segmentDistance(p, v[i], v[(i + 1) % v.size()]));
  }
  return best;
}

std::string formatEnvironment(const Environment& env) {
  std::string out;
  for (const auto& r : env.regions()) {
    out += std::to_string(r.id());
    out += ':';
    for (const Point2& p : r.vertices()) {
      out += ' ';
      out += text::formatDouble(p.x);
      out += ',';
      out += text::formatDouble(p.y);
    }
    out += '\n';
  }
  return out;
}

Environment parseEnvironment(std::string_view input) {
  std::vector<PolygonRegion> regions;
  std::size_t lineNo = 0;
  while (!input.empty()) {
    const std::size_t eol = input.find('\n');
    std::string_view line = input.substr(0, eol);
    input = eol == std::string_view::npos ? std::string_view{} : input.substr(eol + 1);
    ++lineNo;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    const std::size_t colon = line.find(':');
    if (colon == std::string_view::npos) {
      throw ConfigError("environment line " + std::to_string(lineNo) + ": expected `id: x,y ...`");
    }
    const auto id = static_cast<RegionId>(text::parseInteger(line.substr(0, colon)));
    regions.emplace_back(id, text::parsePointList(line.substr(colon + 1)));
  }
  return Environment(std::move(regions));
}

}  // namespace regloc
