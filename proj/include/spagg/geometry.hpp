#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "spagg/field.hpp"
#include "spagg/object.hpp"

namespace spagg::geom {

// Tolerance for every geometric predicate, on normalised coordinates.
inline constexpr double kEps = 1e-9;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point2&) const = default;
  auto operator<=>(const Point2&) const = default;
};

inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
double norm(Point2 a);
double distance(Point2 a, Point2 b);

struct Segment2 {
  Point2 a;
  Point2 b;
};

class Polyline {
 public:
  // Throws ArgumentError when fewer than 2 (open) / 3 (closed) points, or two
  // consecutive points coincide.
  Polyline(std::vector<Point2> points, bool closed);

  const std::vector<Point2>& points() const { return points_; }
  bool closed() const { return closed_; }
  std::size_t size() const { return points_.size(); }
  std::vector<Segment2> segments() const;

 private:
  std::vector<Point2> points_;
  bool closed_;
};

// Simple polygon, vertices in either orientation, no repeated closing vertex.
struct Polygon {
  std::vector<Point2> vertices;
};

// Grid cells (row, col). Each cell is the closed unit square centred on
// (row, col).
using Cell = std::pair<long, long>;
using PixelSet = std::set<Cell>;

using Region = std::variant<PixelSet, Polygon>;

struct Mask {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> values;  // row-major
};

// -- intrinsic geometry ------------------------------------------------------

// Polylines: "length", "curvature" (per vertex, circumscribed-circle
// estimate; open-curve end vertices report 0). Regions: "area",
// "perimeter", "centroid". Anything else throws ArgumentError.
Properties intrinsic_geometry(const Polyline& line, const std::set<std::string>& properties);
Properties intrinsic_geometry(const Region& region, const std::set<std::string>& properties);

double length(const Polyline& line);
double signed_area(const Polygon& polygon);
double area(const Polygon& polygon);
bool is_simple(const Polygon& polygon);
bool is_convex(const Polygon& polygon);
bool self_intersecting(const Polyline& line);

// -- containment -------------------------------------------------------------

// Even-odd rule; points on the boundary (within kEps) are not contained.
bool contain(const Region& outer, Point2 p);
// True iff every point of `inner` is interior to `outer`.
bool contain(const Region& outer, const Region& inner);
bool on_boundary(const Polygon& polygon, Point2 p);

// -- intersection ------------------------------------------------------------

// Result of `intersect`: a point set, a segment set, or a region given as
// pixels or as polygon pieces with disjoint interiors. Empty is a valid value.
struct Intersection {
  std::vector<Point2> points;
  std::vector<Segment2> segments;
  PixelSet pixels;
  std::vector<Polygon> pieces;

  bool empty() const { return points.empty() && segments.empty() && pixels.empty() && pieces.empty(); }
  double area() const;
  bool contains(Point2 p) const;
};

Intersection intersect(const Segment2& s1, const Segment2& s2);
Intersection intersect(const Polyline& a, const Polyline& b);
Intersection intersect(const Region& a, const Region& b);

// Convex polygon clipping and ear-clipping triangulation, exposed for reuse.
Polygon clip_convex(const Polygon& subject, const Polygon& convex_clip);
std::vector<Polygon> triangulate(const Polygon& polygon);

// -- boundary / coboundary ---------------------------------------------------

// Region pixels with at least one 4-neighbour outside the region.
PixelSet boundary(const PixelSet& region);
// The polygon's closed edge cycle.
Polyline boundary(const Polygon& region);

// Enclosed region including the curve itself, found as the complement of the
// exterior flood fill. Throws IllFormedError for open or self-crossing input.
PixelSet coboundary(const PixelSet& closed_curve);
Polygon coboundary(const Polyline& closed_curve);

// -- convolution -------------------------------------------------------------

// Same-size output, edge-clamped: out(r,c) = sum mask(i,j) in(r+i-a, c+j-b).
GridField convolve(const GridField& field, const Mask& mask);

// -- contiguity --------------------------------------------------------------

// Closure of one meets the other. Pixel sets: some cell of `a` equals or is
// 4-adjacent to some cell of `b`. Polygons: closures intersect within kEps.
bool contiguous(const Region& a, const Region& b);

// -- conversions -------------------------------------------------------------

std::vector<Point2> points_of(const SpatialObject& object);
Polygon polygon_of(const SpatialObject& object);

}  // namespace spagg::geom
