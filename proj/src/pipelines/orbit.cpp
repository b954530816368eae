// Layer-1 orbit classifier: dedup, MST aggregate, inconsistent-edge
// clustering, then an ordered rule set over the tree's shape.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

#include "spagg/errors.hpp"
#include "spagg/pipelines.hpp"

namespace spagg::pipelines {

void OrbitParams::validate() const {
  if (!(k_sigma > 0) || depth == 0 || !(length_ratio > 0) || !(closure_ratio > 0) || !(fixed_point_ratio > 0) ||
      min_points == 0 || !(similarity > 0)) {
    throw ArgumentError("orbit parameters must be positive");
  }
  if (!(path_fraction > 0 && path_fraction <= 1)) throw ArgumentError("path_fraction must lie in (0, 1]");
  if (similarity > 1) throw ArgumentError("similarity must be at most 1");
}

std::string_view to_string(OrbitType type) {
  switch (type) {
    case OrbitType::fixed_point: return "fixed-point";
    case OrbitType::open_curve: return "open-curve";
    case OrbitType::closed_curve: return "closed-curve";
    case OrbitType::island_chain: return "island-chain";
    case OrbitType::spatter: return "spatter";
  }
  return "spatter";
}

namespace {

constexpr double kDuplicateTolerance = 1e-12;

double magnitude(const PointSet& points) {
  double m = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto p = points.point(i);
    m = std::max(m, std::hypot(p[0], p[1]));
  }
  return m;
}

// Keeps the first of every group of points closer than the tolerance.
PointSet dedup(const PointSet& points, double tolerance) {
  const std::size_t n = points.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) {
    return std::pair{points.point(a)[0], a} < std::pair{points.point(b)[0], b};
  });
  std::vector<bool> drop(n, false);
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t i = order[s];
    if (drop[i]) continue;
    for (std::size_t t = s + 1; t < n && points.point(order[t])[0] - points.point(i)[0] <= tolerance; ++t) {
      const std::size_t j = order[t];
      if (drop[j]) continue;
      auto a = points.point(i);
      auto b = points.point(j);
      if (std::hypot(a[0] - b[0], a[1] - b[1]) <= tolerance) drop[std::max(i, j)] = true;
      if (j < i && drop[i]) break;
    }
  }
  std::vector<double> coords;
  for (std::size_t i = 0; i < n; ++i) {
    if (drop[i]) continue;
    auto p = points.point(i);
    coords.insert(coords.end(), p.begin(), p.end());
  }
  return PointSet(2, std::move(coords));
}

double diameter(const PointSet& points) {
  double d = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      d = std::max(d, Metric::euclidean()(points.point(i), points.point(j)));
    }
  }
  return d;
}

// Farthest node from `source` along the tree, by weighted distance.
std::size_t farthest(const NGraph& tree, std::size_t source) {
  std::vector<double> dist(tree.size(), -1);
  std::queue<std::size_t> queue;
  dist[source] = 0;
  queue.push(source);
  std::size_t best = source;
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop();
    if (dist[v] > dist[best] || (dist[v] == dist[best] && v < best)) best = v;
    for (const auto& inc : tree.incident(v)) {
      if (dist[inc.neighbor] >= 0) continue;
      dist[inc.neighbor] = dist[v] + tree.edge(inc.edge).weight.value_or(1.0);
      queue.push(inc.neighbor);
    }
  }
  return best;
}

ObjectRules orbit_rules(const OrbitParams& p) {
  ObjectRules rules("orbit-types");
  auto num = [](const SpatialObject& o, const char* key) { return o.props[key].get<double>(); };
  rules.add(
      "similar-clusters",
      [=](const SpatialObject& o) {
        return num(o, "clusters") >= 2 && num(o, "min_cluster") >= p.similarity * num(o, "max_cluster");
      },
      std::string(to_string(OrbitType::island_chain)));
  rules.add(
      "dissimilar-clusters", [=](const SpatialObject& o) { return num(o, "clusters") >= 2; },
      std::string(to_string(OrbitType::spatter)), false);
  rules.add(
      "closed-path",
      [=](const SpatialObject& o) {
        return num(o, "path_share") >= p.path_fraction && num(o, "end_gap") <= p.closure_ratio * num(o, "mean_edge");
      },
      std::string(to_string(OrbitType::closed_curve)));
  rules.add(
      "open-path", [=](const SpatialObject& o) { return num(o, "path_share") >= p.path_fraction; },
      std::string(to_string(OrbitType::open_curve)));
  rules.add(
      "branching", [](const SpatialObject&) { return true; }, std::string(to_string(OrbitType::spatter)));
  return rules;
}

OrbitType type_from(std::string_view label) {
  for (auto t : {OrbitType::fixed_point, OrbitType::open_curve, OrbitType::closed_curve, OrbitType::island_chain,
                 OrbitType::spatter}) {
    if (to_string(t) == label) return t;
  }
  return OrbitType::spatter;
}

}  // namespace

OrbitReport classify_orbit(const PointSet& points, const OrbitParams& params, OperatorTrace* trace) {
  params.validate();
  if (points.empty()) throw EmptyFieldError("orbit: empty point set");
  if (points.dim() != 2) throw ArgumentError("orbit: points must be two-dimensional");

  OrbitReport report;
  const double scale = magnitude(points);
  const PointSet distinct = dedup(points, kDuplicateTolerance * std::max(1.0, scale));
  report.properties["points"] = points.size();
  report.properties["distinct_points"] = distinct.size();
  if (distinct.size() < params.min_points || diameter(distinct) <= params.fixed_point_ratio * scale) {
    report.label = OrbitType::fixed_point;
    report.cluster_count = 1;
    return report;
  }

  const NGraph tree = aggregate(distinct.objects(), combiners::mst(), trace);
  // Cutting a bridge can expose another one its statistics were hiding, so
  // every resulting cluster is rechecked until all are consistent.
  std::vector<bool> cut(tree.edge_count(), false);
  const Dissimilarity dissimilarity = [&](const NGraph& g, const Edge& e) {
    return cut[static_cast<std::size_t>(&e - g.edges().data())] ? 1.0 : 0.0;
  };
  ClassRules cluster_rules("orbit-clusters");
  cluster_rules.add("cluster", [](const ClassView&) { return true; }, "cluster");
  LabeledPartition clusters = classify(tree, dissimilarity, 0.5, cluster_rules, trace);
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& [id, members] : clusters.partition.classes()) {
      if (members.size() < 3) continue;
      std::vector<std::size_t> local(tree.size(), 0);
      std::vector<SpatialObject> nodes;
      for (std::size_t k = 0; k < members.size(); ++k) {
        local[members[k]] = k;
        nodes.push_back(tree.node(members[k]));
      }
      std::vector<Edge> edges;
      for (std::size_t e = 0; e < tree.edge_count(); ++e) {
        const Edge& edge = tree.edge(e);
        if (cut[e] || clusters.partition.class_of(edge.u) != id) continue;
        edges.push_back({local[edge.u], local[edge.v], edge.weight});
      }
      const NGraph subtree(std::move(nodes), std::move(edges), tree.provenance());
      for (auto e : inconsistent_edges(subtree, params.k_sigma, params.depth, params.length_ratio)) {
        const Edge& edge = subtree.edge(e);
        cut[*tree.find_edge(members[edge.u], members[edge.v])] = true;
        changed = true;
      }
    }
    if (changed) clusters = classify(tree, dissimilarity, 0.5, cluster_rules, trace);
  }
  report.inconsistent_edges = static_cast<std::size_t>(std::count(cut.begin(), cut.end(), true));

  std::size_t min_size = tree.size();
  std::size_t max_size = 0;
  for (const auto& [id, members] : clusters.partition.classes()) {
    min_size = std::min(min_size, members.size());
    max_size = std::max(max_size, members.size());
  }
  std::size_t path_nodes = 0;
  for (std::size_t v = 0; v < tree.size(); ++v) {
    if (tree.degree(v) <= 2) ++path_nodes;
  }
  const std::size_t end_a = farthest(tree, 0);
  const std::size_t end_b = farthest(tree, end_a);

  SpatialObject shape;
  shape.kind = "orbit-shape";
  shape.props["clusters"] = clusters.partition.class_count();
  shape.props["min_cluster"] = min_size;
  shape.props["max_cluster"] = max_size;
  shape.props["path_share"] = static_cast<double>(path_nodes) / static_cast<double>(tree.size());
  shape.props["mean_edge"] = tree.total_weight() / static_cast<double>(tree.edge_count());
  shape.props["end_gap"] = Metric::euclidean()(distinct.point(end_a), distinct.point(end_b));

  const ObjectRules rules = orbit_rules(params);
  const auto* rule = rules.first_match(shape);
  report.label = type_from(rule->label);
  report.needs_more_points = !rule->verdict;
  report.cluster_count = clusters.partition.class_count();
  for (const auto& [key, value] : shape.props.items()) report.properties[key] = value;
  return report;
}

nlohmann::json to_json(const OrbitReport& report) {
  return {{"orbit",
           {{"label", to_string(report.label)},
            {"clusters", report.cluster_count},
            {"needs_more_points", report.needs_more_points},
            {"inconsistent_edges", report.inconsistent_edges},
            {"properties", report.properties}}}};
}

std::string summary(const OrbitReport& report) {
  std::ostringstream out;
  out << "label=" << to_string(report.label) << " clusters=" << report.cluster_count;
  return out.str();
}

}  // namespace spagg::pipelines
