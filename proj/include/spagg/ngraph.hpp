#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spagg/field.hpp"
#include "spagg/object.hpp"

namespace spagg {

// Undirected edge, stored with u < v.
struct Edge {
  std::size_t u = 0;
  std::size_t v = 0;
  std::optional<double> weight;

  bool operator==(const Edge&) const = default;
};

// Neighborhood graph: nodes are the objects of one abstraction layer, edges
// their adjacency relation. Immutable once built; edges are kept sorted by
// (u, v) and the constructor rejects self-loops, duplicates, dangling
// endpoints and negative or non-finite weights with a ContractError.
class NGraph {
 public:
  struct Incidence {
    std::size_t neighbor;
    std::size_t edge;
  };

  NGraph() = default;
  NGraph(std::vector<SpatialObject> nodes, std::vector<Edge> edges, std::string provenance);

  const std::vector<SpatialObject>& nodes() const { return nodes_; }
  const SpatialObject& node(std::size_t i) const { return nodes_.at(i); }
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }

  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(std::size_t e) const { return edges_.at(e); }
  std::size_t edge_count() const { return edges_.size(); }

  const std::string& provenance() const { return provenance_; }

  // Incident edges of node i, ordered by neighbor index.
  std::span<const Incidence> incident(std::size_t i) const { return adjacency_.at(i); }
  std::size_t degree(std::size_t i) const { return adjacency_.at(i).size(); }
  std::optional<std::size_t> find_edge(std::size_t a, std::size_t b) const;

  double total_weight() const;

  // Structural equality: nodes and edges, provenance ignored.
  bool same_structure(const NGraph& other) const { return nodes_ == other.nodes_ && edges_ == other.edges_; }

 private:
  std::vector<SpatialObject> nodes_;
  std::vector<Edge> edges_;
  std::string provenance_;
  std::vector<std::vector<Incidence>> adjacency_;
};

// Equivalence classes over node indices. A class id is the smallest node
// index it contains.
class Partition {
 public:
  Partition() = default;
  // Accepts arbitrary per-node labels and canonicalises the ids.
  explicit Partition(const std::vector<std::size_t>& labels);

  std::size_t size() const { return class_of_.size(); }
  std::size_t class_of(std::size_t node) const { return class_of_.at(node); }
  const std::vector<std::size_t>& class_of() const { return class_of_; }
  const std::map<std::size_t, std::vector<std::size_t>>& classes() const { return classes_; }
  std::size_t class_count() const { return classes_.size(); }
  const std::vector<std::size_t>& members(std::size_t id) const { return classes_.at(id); }

  // True when every class of *this lies inside a class of `coarser`.
  bool refines(const Partition& coarser) const;

  bool operator==(const Partition&) const = default;

 private:
  std::vector<std::size_t> class_of_;
  std::map<std::size_t, std::vector<std::size_t>> classes_;
};

using NeighborPredicate = std::function<bool(const SpatialObject&, const SpatialObject&)>;
using EdgePredicate = std::function<bool(const NGraph&, const Edge&)>;

// All-pairs definition: edge (i, j) iff neighbor(objects[i], objects[j]).
NGraph construct(std::vector<SpatialObject> objects, const NeighborPredicate& neighbor,
                 std::string provenance = "predicate");

// Objects whose first point lies on the integer lattice; edge iff the two
// lattice points are at unit row or column offset. Same result as
// `construct` with that predicate, built through a cell index.
NGraph construct_lattice_adjacency(std::vector<SpatialObject> objects);
NGraph construct_4adjacency(const GridField& field);

NGraph construct_knn(const PointSet& points, std::size_t k, const Metric& metric);
NGraph construct_mst(const PointSet& points, const Metric& metric);
NGraph construct_delaunay(const PointSet& points);

// Edge iff the minimum point-to-point distance between the two objects'
// geometries is below `radius` (or at most `radius` when `inclusive`).
NGraph construct_near(std::vector<SpatialObject> objects, double radius, bool inclusive = false,
                      const Metric& metric = Metric::euclidean());

// First point of every object, as a point set.
PointSet object_points(std::span<const SpatialObject> objects);

NGraph graph_map(const NGraph& g, const std::function<SpatialObject(const SpatialObject&)>& proc);
NGraph graph_map(const NGraph& g, const std::function<SpatialObject(const NGraph&, std::size_t)>& proc);

// Induced subgraph on the nodes passing `mask`. Each kept node records its
// index in the root graph under props["origin"] (set once, never rewritten).
NGraph graph_filter(const NGraph& g, const std::function<bool(const SpatialObject&)>& mask);

Partition connected_components(const NGraph& g, const EdgePredicate& edge_pred = {});

// Edges of a weighted tree that are longer than mean + k_sigma * stddev of
// the edges within `depth` hops of their endpoints (the edge itself
// excluded), and longer than min_ratio * their median. Edges with fewer than two
// nearby edges are never flagged. Returns sorted edge indices.
std::vector<std::size_t> inconsistent_edges(const NGraph& tree, double k_sigma = 2.0, std::size_t depth = 2,
                                            double min_ratio = 1.0);

nlohmann::json to_json(const NGraph& g);

}  // namespace spagg
