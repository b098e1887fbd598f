#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace regloc {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr bool operator==(const Point2&, const Point2&) = default;
};

constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
constexpr Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 p) { return std::hypot(p.x, p.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
constexpr double squaredDistance(Point2 a, Point2 b) { return dot(a - b, a - b); }
constexpr Point2 midpoint(Point2 a, Point2 b) { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }

/// Hypothesis index. Regions are numbered 1..N; 0 is the "outside the
/// neighborhood" hypothesis used by the limited-communication decision.
using RegionId = int;
inline constexpr RegionId kOutsideHypothesis = 0;

struct BoundingBox {
  Point2 lo;
  Point2 hi;

  double width() const { return hi.x - lo.x; }
  double height() const { return hi.y - lo.y; }
  double scale() const { return std::max(width(), height()); }
};

BoundingBox boundsOf(std::span<const Point2> points);

struct Triangle {
  Point2 a;
  Point2 b;
  Point2 c;

  double area() const { return 0.5 * std::abs(cross(b - a, c - a)); }
  Point2 centroid() const { return {(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0}; }
};

/// Distance from p to the closed segment [a, b].
double segmentDistance(Point2 p, Point2 a, Point2 b);
/// Distance from p to the closed triangle (0 inside).
double triangleDistance(const Triangle& t, Point2 p);

enum class Location { Outside, Boundary, Inside };

/// Simple polygon, stored counter-clockwise, tagged with its hypothesis id.
class PolygonRegion {
 public:
  /// Validates the ring (>= 3 vertices, finite, simple, positive area) and
  /// reorients clockwise input. A closing vertex equal to the first and exact
  /// consecutive duplicates are dropped. Throws ConfigError.
  PolygonRegion(RegionId id, std::vector<Point2> vertices);

  RegionId id() const { return id_; }
  std::span<const Point2> vertices() const { return vertices_; }
  double area() const { return area_; }
  Point2 centroid() const { return centroid_; }
  const BoundingBox& bounds() const { return bounds_; }
  bool isConvex() const;

  /// Ear-clipping triangulation; triangles are counter-clockwise.
  std::span<const Triangle> triangles() const { return triangles_; }

  /// Classifies p; points within `tol` of an edge are on the boundary.
  Location locate(Point2 p, double tol) const;
  Location locate(Point2 p) const { return locate(p, tolerance()); }
  bool contains(Point2 p) const { return locate(p) != Location::Outside; }

  /// Scale-relative boundary tolerance (1e-9 of the bounding-box extent).
  double tolerance() const { return 1e-9 * bounds_.scale(); }

 private:
  RegionId id_;
  std::vector<Point2> vertices_;
  double area_ = 0.0;
  Point2 centroid_;
  BoundingBox bounds_;
  std::vector<Triangle> triangles_;
};

/// A planar environment tiled by polygon regions with ids 1..N.
class Environment {
 public:
  /// Sorts by id and validates: ids are exactly 1..N, regions are pairwise
  /// interior-disjoint and the union is edge-connected. Throws ConfigError.
  explicit Environment(std::vector<PolygonRegion> regions);

  std::span<const PolygonRegion> regions() const { return regions_; }
  const PolygonRegion& region(RegionId id) const;
  std::size_t size() const { return regions_.size(); }
  double totalArea() const { return totalArea_; }
  const BoundingBox& bounds() const { return bounds_; }
  std::vector<RegionId> ids() const;
  double tolerance() const { return 1e-9 * bounds_.scale(); }

  /// Every triangle of every region, tagged with its region id.
  struct TaggedTriangle {
    Triangle triangle;
    RegionId region;
  };
  std::span<const TaggedTriangle> triangulation() const { return triangulation_; }

 private:
  std::vector<PolygonRegion> regions_;
  double totalArea_ = 0.0;
  BoundingBox bounds_;
  std::vector<TaggedTriangle> triangulation_;
};

std::vector<Triangle> earClip(std::span<const Point2> ccwVertices);

/// Voronoi cells of `sites` clipped to a convex `boundary`; cell i (1-based)
/// belongs to sites[i-1]. Throws ConfigError on duplicate sites, sites not
/// strictly inside the boundary, or a non-convex boundary.
Environment voronoiPartition(std::span<const Point2> sites, const PolygonRegion& boundary);

/// Region containing p; points on a shared edge go to the lowest id.
/// Throws ConfigError when p lies outside every region.
RegionId containingRegion(const Environment& env, Point2 p);

/// Total angle (radians) of the arcs of the circle (center, radius) lying in
/// the region. Radius 0 yields 2*pi for an interior center and 0 otherwise.
double subtendedAngle(const PolygonRegion& region, Point2 center, double radius);

/// Euclidean distance from p to the region, 0 when p is inside or on it.
double regionDistance(const PolygonRegion& region, Point2 p);

/// One region per line: `j: x1,y1 x2,y2 ...`. Blank lines and `#` comments
/// are ignored when parsing.
std::string formatEnvironment(const Environment& env);
Environment parseEnvironment(std::string_view text);

}  // namespace regloc
