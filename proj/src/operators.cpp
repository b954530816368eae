#include "spagg/operators.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>

#include "spagg/errors.hpp"
#include "spagg/geometry.hpp"

namespace spagg {

namespace {

void record(OperatorTrace* trace, std::string entry) {
  if (trace != nullptr) trace->calls.push_back(std::move(entry));
}

geom::Polyline polyline_of(const SpatialObject& o) {
  return geom::Polyline(geom::points_of(o), o.props.value("closed", false));
}

}  // namespace

PredicateRegistry PredicateRegistry::builtins() {
  PredicateRegistry r;
  r.add("closed?", [](const SpatialObject& o) { return o.props.value("closed", false); });
  r.add("self-intersecting?", [](const SpatialObject& o) {
    try {
      return geom::self_intersecting(polyline_of(o));
    } catch (const ArgumentError&) {
      // Repeated consecutive points or too few points: not a simple curve.
      return true;
    }
  });
  return r;
}

void PredicateRegistry::add(std::string name, Predicate predicate) {
  predicates_.insert_or_assign(std::move(name), std::move(predicate));
}

const PredicateRegistry::Predicate& PredicateRegistry::get(std::string_view name) const {
  auto it = predicates_.find(name);
  if (it == predicates_.end()) throw ConfigError("unknown predicate: " + std::string(name));
  return it->second;
}

PredicateRegistry::Predicate PredicateRegistry::all_of(std::initializer_list<std::string_view> terms) const {
  std::vector<std::pair<bool, Predicate>> parts;
  for (auto term : terms) {
    const bool negate = !term.empty() && term.front() == '!';
    parts.emplace_back(negate, get(negate ? term.substr(1) : term));
  }
  return [parts = std::move(parts)](const SpatialObject& o) {
    for (const auto& [negate, p] : parts) {
      if (p(o) == negate) return false;
    }
    return true;
  };
}

ObjectRules contour_rules() {
  const auto preds = PredicateRegistry::builtins();
  ObjectRules rules("contour-consistency");
  rules.add("closed-and-simple", preds.all_of({"closed?", "!self-intersecting?"}), "legal", true);
  rules.add("otherwise", [](const SpatialObject&) { return true; }, "illegal", false);
  return rules;
}

PairRules no_containment_rules() {
  PairRules rules("no-containment");
  rules.add(
      "containment",
      [](const SpatialObject& a, const SpatialObject& b) {
        if (a.point_count() < 3 || b.point_count() < 3) return false;
        const geom::Region ra = geom::polygon_of(a);
        const geom::Region rb = geom::polygon_of(b);
        return geom::contain(ra, rb) || geom::contain(rb, ra);
      },
      "contained", false);
  return rules;
}

nlohmann::json to_json(const LabeledPartition& lp) {
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& [id, members] : lp.partition.classes()) {
    auto label = lp.labels.find(id);
    auto props = lp.class_props.find(id);
    classes.push_back({{"id", id},
                       {"label", label == lp.labels.end() ? "unclassified" : label->second},
                       {"members", members},
                       {"props", props == lp.class_props.end() ? Properties::object() : props->second}});
  }
  return {{"classes", std::move(classes)}};
}

namespace combiners {

Combiner predicate(NeighborPredicate neighbor, std::string name) {
  return {name, [neighbor = std::move(neighbor), name](std::vector<SpatialObject> objects) {
            return construct(std::move(objects), neighbor, name);
          }};
}

Combiner four_adjacency() {
  return {"4-adjacency", [](std::vector<SpatialObject> objects) { return construct_lattice_adjacency(std::move(objects)); }};
}

Combiner knn(std::size_t k, Metric metric) {
  return {"knn", [k, metric = std::move(metric)](std::vector<SpatialObject> objects) {
            NGraph g = construct_knn(object_points(objects), k, metric);
            return NGraph(std::move(objects), g.edges(), "knn");
          }};
}

Combiner mst(Metric metric) {
  return {"mst", [metric = std::move(metric)](std::vector<SpatialObject> objects) {
            NGraph g = construct_mst(object_points(objects), metric);
            return NGraph(std::move(objects), g.edges(), "mst");
          }};
}

Combiner delaunay() {
  return {"delaunay", [](std::vector<SpatialObject> objects) {
            NGraph g = construct_delaunay(object_points(objects));
            return NGraph(std::move(objects), g.edges(), "delaunay");
          }};
}

Combiner near(double radius, bool inclusive, Metric metric) {
  return {"near", [radius, inclusive, metric = std::move(metric)](std::vector<SpatialObject> objects) {
            return construct_near(std::move(objects), radius, inclusive, metric);
          }};
}

}  // namespace combiners

CombinerRegistry CombinerRegistry::builtins() {
  CombinerRegistry r;
  r.add(combiners::four_adjacency());
  r.add(combiners::mst());
  r.add(combiners::delaunay());
  r.add(combiners::knn(1));
  return r;
}

void CombinerRegistry::add(Combiner combiner) {
  auto name = combiner.name;
  combiners_.insert_or_assign(std::move(name), std::move(combiner));
}

const Combiner& CombinerRegistry::get(std::string_view name) const {
  auto it = combiners_.find(name);
  if (it == combiners_.end()) throw ConfigError("unknown combiner: " + std::string(name));
  return it->second;
}

NGraph aggregate(std::vector<SpatialObject> objects, const Combiner& combiner, OperatorTrace* trace) {
  if (!combiner.build) throw ConfigError("combiner '" + combiner.name + "' has no constructor");
  record(trace, "aggregate:" + combiner.name);
  if (objects.empty()) return NGraph({}, {}, combiner.name);
  NGraph g = combiner.build(std::move(objects));
  return NGraph(g.nodes(), g.edges(), combiner.name);
}

NGraph aggregate(std::vector<SpatialObject> objects, std::string_view combiner, const CombinerRegistry& registry,
                 OperatorTrace* trace) {
  return aggregate(std::move(objects), registry.get(combiner), trace);
}

LabeledPartition classify(const NGraph& g, const Dissimilarity& dissimilarity, double threshold,
                          const ClassRules& class_rules, OperatorTrace* trace) {
  record(trace, "classify");
  std::vector<bool> similar(g.edge_count());
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const double d = dissimilarity(g, g.edge(e));
    if (!(d >= 0.0)) throw ContractError("dissimilarity must be non-negative, got " + std::to_string(d));
    similar[e] = d <= threshold;
  }
  LabeledPartition lp;
  lp.partition = connected_components(g, [&](const NGraph& graph, const Edge& edge) {
    return similar[static_cast<std::size_t>(&edge - graph.edges().data())];
  });
  for (const auto& [id, members] : lp.partition.classes()) {
    const ClassView view{g, id, members};
    const auto* rule = class_rules.first_match(view);
    lp.labels[id] = rule != nullptr ? rule->label : "unclassified";
    lp.class_props[id] = {{"size", members.size()}};
  }
  return lp;
}

Descriptions& Descriptions::add(std::string label, DescriptionType description) {
  descriptions_.insert_or_assign(std::move(label), std::move(description));
  return *this;
}

const DescriptionType* Descriptions::find(std::string_view label) const {
  auto it = descriptions_.find(label);
  return it == descriptions_.end() ? nullptr : &it->second;
}

DescriptionType compound_description(std::string kind) {
  return [kind = std::move(kind)](const ClassView& view) {
    SpatialObject o;
    o.kind = kind;
    o.dim = view.graph.node(view.members.front()).dim;
    for (auto m : view.members) {
      const auto& node = view.graph.node(m);
      o.coords.insert(o.coords.end(), node.coords.begin(), node.coords.end());
    }
    return o;
  };
}

std::vector<SpatialObject> redescribe(const LabeledPartition& lp, const NGraph& g, const Descriptions& descriptions,
                                      const std::set<std::string>& labels, OperatorTrace* trace) {
  record(trace, "redescribe");
  struct Work {
    std::size_t id;
    std::string label;
    const DescriptionType* desc;
  };
  std::vector<Work> work;
  for (const auto& [id, members] : lp.partition.classes()) {
    auto it = lp.labels.find(id);
    const std::string label = it == lp.labels.end() ? "unclassified" : it->second;
    if (!labels.empty() && !labels.contains(label)) continue;
    const auto* desc = descriptions.find(label);
    if (desc == nullptr) throw ConfigError("no description type registered for label '" + label + "'");
    work.push_back({id, label, desc});
  }
  std::vector<SpatialObject> out;
  out.reserve(work.size());
  for (const auto& [id, label, desc] : work) {
    const auto& members = lp.partition.members(id);
    SpatialObject o = (*desc)(ClassView{g, id, members});
    o.members = members;
    o.props["label"] = label;
    o.props["class"] = id;
    out.push_back(std::move(o));
  }
  return out;
}

std::vector<std::size_t> localize_indices(const NGraph& g, const NodeSelect& select, const NodeEnumeration& enumerate) {
  std::vector<std::size_t> order;
  if (enumerate) {
    order = enumerate(g);
  } else {
    order.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) order[i] = i;
  }
  std::vector<bool> seen(g.size(), false);
  std::vector<std::size_t> out;
  for (auto i : order) {
    if (i >= g.size()) throw ArgumentError("localize: enumeration yielded an invalid node");
    if (seen[i]) throw ArgumentError("localize: enumeration yielded node " + std::to_string(i) + " twice");
    seen[i] = true;
    if (select(g, i)) out.push_back(i);
  }
  return out;
}

std::vector<SpatialObject> localize(const NGraph& g, const NodeSelect& select, const NodeEnumeration& enumerate) {
  std::vector<SpatialObject> out;
  for (auto i : localize_indices(g, select, enumerate)) out.push_back(g.node(i));
  return out;
}

namespace {

double edge_cost(const Edge& e) { return e.weight.value_or(1.0); }

std::vector<Path> collect_paths(const NGraph& g, const NodeSelect& goal, const std::vector<std::size_t>& parent,
                                const std::vector<bool>& reached) {
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<Path> out;
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (!reached[v] || !goal(g, v)) continue;
    Path p;
    for (std::size_t u = v; u != none; u = parent[u]) p.nodes.push_back(u);
    std::reverse(p.nodes.begin(), p.nodes.end());
    for (std::size_t i = 1; i < p.nodes.size(); ++i) p.cost += edge_cost(g.edge(*g.find_edge(p.nodes[i - 1], p.nodes[i])));
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

std::vector<Path> search(const NGraph& g, const std::vector<std::size_t>& initial, const NodeSelect& goal,
                         Frontier frontier) {
  if (initial.empty()) throw ArgumentError("search: initial node set is empty");
  for (auto s : initial) {
    if (s >= g.size()) throw ArgumentError("search: initial node out of range");
  }
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> sources = initial;
  std::sort(sources.begin(), sources.end());
  sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
  std::vector<std::size_t> parent(g.size(), none);
  std::vector<bool> reached(g.size(), false);

  switch (frontier) {
    case Frontier::fifo: {
      std::deque<std::size_t> queue;
      for (auto s : sources) {
        reached[s] = true;
        queue.push_back(s);
      }
      while (!queue.empty()) {
        const std::size_t v = queue.front();
        queue.pop_front();
        for (const auto& inc : g.incident(v)) {
          if (reached[inc.neighbor]) continue;
          reached[inc.neighbor] = true;
          parent[inc.neighbor] = v;
          queue.push_back(inc.neighbor);
        }
      }
      break;
    }
    case Frontier::lifo: {
      std::vector<std::pair<std::size_t, std::size_t>> stack;  // (node, parent)
      for (auto it = sources.rbegin(); it != sources.rend(); ++it) stack.emplace_back(*it, none);
      while (!stack.empty()) {
        auto [v, from] = stack.back();
        stack.pop_back();
        if (reached[v]) continue;
        reached[v] = true;
        parent[v] = from;
        auto inc = g.incident(v);
        for (auto it = inc.rbegin(); it != inc.rend(); ++it) {
          if (!reached[it->neighbor]) stack.emplace_back(it->neighbor, v);
        }
      }
      break;
    }
    case Frontier::priority: {
      for (const auto& e : g.edges()) {
        if (edge_cost(e) < 0) throw ArgumentError("search: negative edge weight");
      }
      std::vector<double> dist(g.size(), std::numeric_limits<double>::infinity());
      using Item = std::pair<double, std::size_t>;
      std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
      for (auto s : sources) {
        dist[s] = 0.0;
        queue.emplace(0.0, s);
      }
      while (!queue.empty()) {
        auto [d, v] = queue.top();
        queue.pop();
        if (reached[v]) continue;
        reached[v] = true;
        for (const auto& inc : g.incident(v)) {
          const double alt = d + edge_cost(g.edge(inc.edge));
          if (alt < dist[inc.neighbor]) {
            dist[inc.neighbor] = alt;
            parent[inc.neighbor] = v;
            queue.emplace(alt, inc.neighbor);
          }
        }
      }
      break;
    }
  }
  return collect_paths(g, goal, parent, reached);
}

std::optional<geom::Region> node_extent(const SpatialObject& node) {
  if (node.dim != 2) return std::nullopt;
  if (node.kind == "pixel") {
    geom::PixelSet cells;
    for (std::size_t i = 0; i < node.point_count(); ++i) {
      auto p = node.point(i);
      cells.insert({std::lround(p[0]), std::lround(p[1])});
    }
    return cells;
  }
  if (node.point_count() >= 3) return geom::polygon_of(node);
  return std::nullopt;
}

TransitionReport incremental_analyze(const NGraph& g, const SpatialObject& state, std::span<const double> delta) {
  if (state.point_count() == 0 || state.dim != 2 || delta.size() != 2) {
    throw ArgumentError("incremental_analyze: state needs a 2D location and delta two components");
  }
  auto loc = state.point(0);
  const geom::Point2 before{loc[0], loc[1]};
  const geom::Point2 after{loc[0] + delta[0], loc[1] + delta[1]};
  auto locate = [&](geom::Point2 p) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto extent = node_extent(g.node(i));
      if (extent && geom::contain(*extent, p)) return i;
    }
    return std::nullopt;
  };
  auto from = locate(before);
  if (!from) throw ContainmentError("incremental_analyze: initial location lies in no node");
  TransitionReport report;
  report.from = *from;
  report.to = locate(after);
  report.changed = report.to != report.from;
  return report;
}

bool pairwise_consistent(const SpatialObject& a, const SpatialObject& b, const PairRules& rules) {
  for (const auto* rule : rules.matches(a, b)) {
    if (!rule->verdict) return false;
  }
  return true;
}

bool consistent(const SpatialObject& object, const ObjectRules& rules) {
  const auto* rule = rules.first_match(object);
  return rule == nullptr || rule->verdict;
}

LayerResult run_layer(std::vector<SpatialObject> objects, const Layer& layer, OperatorTrace* trace) {
  LayerResult result;
  result.graph = aggregate(std::move(objects), layer.combiner, trace);
  result.classes = classify(result.graph, layer.dissimilarity, layer.threshold, layer.class_rules, trace);
  result.objects = redescribe(result.classes, result.graph, layer.descriptions, layer.lift, trace);
  return result;
}

}  // namespace spagg
