#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace spagg {

using Properties = nlohmann::json;

// A layer-polymorphic object: a pixel, a sample point, a boundary segment, a
// contour or an orbit. Geometry is an ordered list of points of a fixed
// dimension stored flat; `members` holds the lower-layer node indices the
// object was lifted from (empty for primitive objects).
struct SpatialObject {
  std::string kind;
  std::size_t dim = 2;
  std::vector<double> coords;
  Properties props = Properties::object();
  std::vector<std::size_t> members;

  std::size_t point_count() const { return dim == 0 ? 0 : coords.size() / dim; }

  std::span<const double> point(std::size_t i) const {
    return {coords.data() + i * dim, dim};
  }

  void add_point(std::span<const double> p) { coords.insert(coords.end(), p.begin(), p.end()); }

  bool operator==(const SpatialObject&) const = default;
};

inline SpatialObject make_point_object(std::string kind, std::vector<double> coords) {
  SpatialObject o;
  o.kind = std::move(kind);
  o.dim = coords.size();
  o.coords = std::move(coords);
  return o;
}

}  // namespace spagg
