#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spagg/field.hpp"
#include "spagg/geometry.hpp"
#include "spagg/ngraph.hpp"
#include "spagg/operators.hpp"

namespace spagg::pipelines {

// ---------------------------------------------------------------------------
// Boundary tracer: bitmap -> pixel graph -> boundary segments -> contours.
// ---------------------------------------------------------------------------

struct TracerParams {
  double threshold1 = 0.5;  // pixel classify
  double threshold2 = 0.5;  // segment classify
  double separation = 2.5;  // px, segment neighborhood (strict <)
  double delta = 2.5;       // px, endpoint separation for colinearity
  double epsilon = 30.0;    // degrees, tangent angle for colinearity
  std::size_t tangent_window = 3;  // endpoint pixels used for the tangent fit

  void validate() const;  // throws ArgumentError
};

// A path-ordered run of pixels (row, col). Tangents are unit vectors at the
// front and back ends, pointing out of the segment; absent for single pixels.
struct Segment {
  std::vector<geom::Point2> points;
  bool closed = false;
  bool junction = false;
  std::optional<std::array<geom::Point2, 2>> tangents;

  std::size_t size() const { return points.size(); }
};

Segment segment_from(const SpatialObject& object);
SpatialObject to_object(const Segment& segment);

struct Contour {
  std::vector<std::size_t> segments;  // indices into TraceResult::segments
  std::vector<geom::Point2> polyline;
  bool closed = false;
  bool legal = false;
};

struct TraceResult {
  std::vector<geom::Point2> junctions;  // (row, col), row-major order
  std::vector<Segment> segments;        // every foreground class, junction singletons included
  std::vector<Contour> contours;
  NGraph segment_graph;
  LabeledPartition contour_classes;

  std::size_t multi_pixel_segments() const;
  std::size_t legal_contours() const;
};

// Value 1 with more than two one-valued 4-neighbours.
bool is_junction(const GridField& grid, std::size_t row, std::size_t col);

// Some endpoint pair is within `delta` and the tangents there differ by at
// most `epsilon_deg` degrees modulo 180. False when either segment has a
// single point.
bool segment_colinear(const Segment& a, const Segment& b, double delta, double epsilon_deg);

// The two tracer layers, exposed so callers can inspect or reuse them.
Layer pixel_layer(const TracerParams& params);
Layer segment_layer(const TracerParams& params);

TraceResult trace_boundaries(const GridField& grid, const TracerParams& params = {}, OperatorTrace* trace = nullptr);

nlohmann::json to_json(const TraceResult& result);
// "contours=C legal=L segments=S junctions=J"
std::string summary(const TraceResult& result);

// ---------------------------------------------------------------------------
// Orbit classifier: point set -> MST -> clusters -> orbit type.
// ---------------------------------------------------------------------------

struct OrbitParams {
  double k_sigma = 2.0;          // inconsistent edge: stddev multiple
  std::size_t depth = 2;         // inconsistent edge: neighbourhood hops
  double length_ratio = 15.0;    // inconsistent edge: minimum multiple of the nearby median
  double closure_ratio = 3.0;    // closed iff endpoint gap <= closure_ratio * mean edge
  double path_fraction = 0.95;   // path-shaped iff this share of nodes has degree <= 2
  double fixed_point_ratio = 1e-9;  // fixed point iff diameter <= ratio * coordinate magnitude
  std::size_t min_points = 3;    // fewer distinct points: fixed point
  double similarity = 0.25;      // clusters similar iff min size >= similarity * max size

  void validate() const;  // throws ArgumentError
};

enum class OrbitType { fixed_point, open_curve, closed_curve, island_chain, spatter };

std::string_view to_string(OrbitType type);

struct OrbitReport {
  OrbitType label = OrbitType::spatter;
  std::size_t cluster_count = 0;
  bool needs_more_points = false;
  std::size_t inconsistent_edges = 0;
  Properties properties = Properties::object();
};

OrbitReport classify_orbit(const PointSet& points, const OrbitParams& params = {}, OperatorTrace* trace = nullptr);

nlohmann::json to_json(const OrbitReport& report);
// "label=L clusters=N"
std::string summary(const OrbitReport& report);

}  // namespace spagg::pipelines
