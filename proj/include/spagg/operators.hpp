#pragma once

// Task-level operators. They act the same way on every abstraction layer:
// aggregate builds a neighborhood graph, classify partitions it into labeled
// equivalence classes, redescribe lifts each class to a higher-level object,
// localize/search open aggregates back up, and the consistency predicates
// check objects against rule sets.

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spagg/field.hpp"
#include "spagg/geometry.hpp"
#include "spagg/ngraph.hpp"
#include "spagg/object.hpp"

namespace spagg {

// Ordered log of operator invocations, used to check how a pipeline is
// composed. Entries look like "aggregate:4-adjacency", "classify",
// "redescribe".
struct OperatorTrace {
  std::vector<std::string> calls;
};

// One equivalence class of a graph, as seen by class rules and description
// types.
struct ClassView {
  const NGraph& graph;
  std::size_t id;
  std::span<const std::size_t> members;
};

// Ordered production rules. A rule fires when its pattern matches; the first
// firing rule decides for labelling and for `consistent`, every firing rule
// contributes for `pairwise_consistent`.
template <class... Args>
class RuleSet {
 public:
  using Pattern = std::function<bool(const Args&...)>;

  struct Rule {
    std::string name;
    Pattern pattern;
    std::string label;
    bool verdict = true;
  };

  explicit RuleSet(std::string name = {}) : name_(std::move(name)) {}

  RuleSet& add(std::string rule_name, Pattern pattern, std::string label, bool verdict = true) {
    rules_.push_back({std::move(rule_name), std::move(pattern), std::move(label), verdict});
    return *this;
  }

  const Rule* first_match(const Args&... args) const {
    for (const auto& r : rules_) {
      if (r.pattern(args...)) return &r;
    }
    return nullptr;
  }

  std::vector<const Rule*> matches(const Args&... args) const {
    std::vector<const Rule*> out;
    for (const auto& r : rules_) {
      if (r.pattern(args...)) out.push_back(&r);
    }
    return out;
  }

  const std::string& name() const { return name_; }
  const std::vector<Rule>& rules() const { return rules_; }
  bool empty() const { return rules_.empty(); }

 private:
  std::string name_;
  std::vector<Rule> rules_;
};

using ObjectRules = RuleSet<SpatialObject>;
using PairRules = RuleSet<SpatialObject, SpatialObject>;
using ClassRules = RuleSet<ClassView>;

// Named object predicates, the vocabulary rules are written in. Built-ins:
// "closed?", "self-intersecting?".
class PredicateRegistry {
 public:
  using Predicate = std::function<bool(const SpatialObject&)>;

  static PredicateRegistry builtins();

  void add(std::string name, Predicate predicate);
  const Predicate& get(std::string_view name) const;  // throws ConfigError

  // Conjunction of named predicates; a leading '!' negates a term.
  Predicate all_of(std::initializer_list<std::string_view> terms) const;

 private:
  std::map<std::string, Predicate, std::less<>> predicates_;
};

// Legal iff closed and not self-intersecting.
ObjectRules contour_rules();
// Fails when either object contains the other (objects read as polygons).
PairRules no_containment_rules();

struct LabeledPartition {
  Partition partition;
  std::map<std::size_t, std::string> labels;
  std::map<std::size_t, Properties> class_props;
};

nlohmann::json to_json(const LabeledPartition& lp);

// Graph-building strategy handed to aggregate.
struct Combiner {
  std::string name;
  std::function<NGraph(std::vector<SpatialObject>)> build;
};

namespace combiners {
Combiner predicate(NeighborPredicate neighbor, std::string name = "predicate");
Combiner four_adjacency();
Combiner knn(std::size_t k, Metric metric = Metric::euclidean());
Combiner mst(Metric metric = Metric::euclidean());
Combiner delaunay();
Combiner near(double radius, bool inclusive = false, Metric metric = Metric::euclidean());
}  // namespace combiners

class CombinerRegistry {
 public:
  // "4-adjacency", "mst", "delaunay", "knn" (k = 1).
  static CombinerRegistry builtins();

  void add(Combiner combiner);
  const Combiner& get(std::string_view name) const;  // throws ConfigError

 private:
  std::map<std::string, Combiner, std::less<>> combiners_;
};

NGraph aggregate(std::vector<SpatialObject> objects, const Combiner& combiner, OperatorTrace* trace = nullptr);
NGraph aggregate(std::vector<SpatialObject> objects, std::string_view combiner, const CombinerRegistry& registry,
                 OperatorTrace* trace = nullptr);

// Dissimilarity of the two endpoints of an edge; must be >= 0.
using Dissimilarity = std::function<double(const NGraph&, const Edge&)>;

// Classes are the connected components over edges whose dissimilarity is at
// most `threshold`; each is labelled by the first matching class rule, or
// "unclassified".
LabeledPartition classify(const NGraph& g, const Dissimilarity& dissimilarity, double threshold,
                          const ClassRules& class_rules, OperatorTrace* trace = nullptr);

// Builds the higher-level object for one class.
using DescriptionType = std::function<SpatialObject(const ClassView&)>;

class Descriptions {
 public:
  Descriptions& add(std::string label, DescriptionType description);
  const DescriptionType* find(std::string_view label) const;

 private:
  std::map<std::string, DescriptionType, std::less<>> descriptions_;
};

// Generic description: the member geometries concatenated in member order.
DescriptionType compound_description(std::string kind);

// One object per class (restricted to classes whose label is in `labels`
// when that set is non-empty), in class-id order. Each result records its
// class members in `members` and its label/class id in props.
std::vector<SpatialObject> redescribe(const LabeledPartition& lp, const NGraph& g, const Descriptions& descriptions,
                                      const std::set<std::string>& labels = {}, OperatorTrace* trace = nullptr);

using NodeSelect = std::function<bool(const NGraph&, std::size_t)>;
using NodeEnumeration = std::function<std::vector<std::size_t>(const NGraph&)>;

// Members in enumeration order (index order by default) that pass `select`.
std::vector<SpatialObject> localize(const NGraph& g, const NodeSelect& select, const NodeEnumeration& enumerate = {});
std::vector<std::size_t> localize_indices(const NGraph& g, const NodeSelect& select,
                                          const NodeEnumeration& enumerate = {});

enum class Frontier { fifo, lifo, priority };

struct Path {
  std::vector<std::size_t> nodes;
  double cost = 0.0;  // sum of edge weights, unweighted edges count 1

  std::size_t hops() const { return nodes.empty() ? 0 : nodes.size() - 1; }
};

// One path per reachable goal node, ordered by goal index. fifo gives
// fewest-edge paths, priority least-cost paths, lifo depth-first tree paths.
std::vector<Path> search(const NGraph& g, const std::vector<std::size_t>& initial, const NodeSelect& goal,
                         Frontier frontier);

struct TransitionReport {
  std::size_t from = 0;
  std::optional<std::size_t> to;
  bool changed = false;
};

// Geometric extent of a node, if it has one: "pixel" nodes are unit cells,
// nodes with three or more points are polygons.
std::optional<geom::Region> node_extent(const SpatialObject& node);

// Which node holds the state's location before and after adding `delta`.
TransitionReport incremental_analyze(const NGraph& g, const SpatialObject& state, std::span<const double> delta);

bool pairwise_consistent(const SpatialObject& a, const SpatialObject& b, const PairRules& rules);
bool consistent(const SpatialObject& object, const ObjectRules& rules);

// A layer of the paradigm: aggregate -> classify -> redescribe with the given
// parameters. `lift` selects which class labels are redescribed.
struct Layer {
  std::string name;
  Combiner combiner;
  Dissimilarity dissimilarity;
  double threshold = 0.5;
  ClassRules class_rules;
  Descriptions descriptions;
  std::set<std::string> lift;
};

struct LayerResult {
  NGraph graph;
  LabeledPartition classes;
  std::vector<SpatialObject> objects;
};

LayerResult run_layer(std::vector<SpatialObject> objects, const Layer& layer, OperatorTrace* trace = nullptr);

}  // namespace spagg
