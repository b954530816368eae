#pragma once

// Deterministic SVG 1.1 rendering of layer results. Presentation only: every
// element mirrors something already present in the JSON output.

#include <string>
#include <vector>

#include "spagg/field.hpp"
#include "spagg/geometry.hpp"
#include "spagg/ngraph.hpp"
#include "spagg/pipelines.hpp"

namespace spagg::svg {

struct PathItem {
  std::vector<geom::Point2> points;  // drawing coordinates (x right, y down)
  bool closed = false;
  std::string css_class;
};

struct LineItem {
  geom::Point2 a;
  geom::Point2 b;
  std::string css_class;
};

struct DotItem {
  geom::Point2 at;
  std::string css_class;
};

struct CellItem {
  geom::Point2 corner;
  double gray = 0.0;  // 0 black .. 1 white
};

struct Scene {
  std::vector<CellItem> cells;
  std::vector<PathItem> paths;
  std::vector<LineItem> lines;
  std::vector<DotItem> dots;
};

// viewBox is the bounding box of every item grown by 5% per side; an empty
// scene renders as an empty document.
std::string render(const Scene& scene);

// Contours as <path class="contour legal|illegal">, junctions as dots.
Scene scene_of(const pipelines::TraceResult& result);
// Edges as <line class="edge">, nodes as dots. Uses the first point of each node.
Scene scene_of(const NGraph& graph);
Scene scene_of(const PointSet& points);
Scene scene_of(const GridField& field);

}  // namespace spagg::svg
