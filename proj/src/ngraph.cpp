#include "spagg/ngraph.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <tuple>
#include <unordered_map>

#include "spagg/errors.hpp"

namespace spagg {

NGraph::NGraph(std::vector<SpatialObject> nodes, std::vector<Edge> edges, std::string provenance)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), provenance_(std::move(provenance)) {
  const std::size_t n = nodes_.size();
  for (auto& e : edges_) {
    if (e.u > e.v) std::swap(e.u, e.v);
    if (e.u == e.v) throw ContractError("self-loop at node " + std::to_string(e.u));
    if (e.v >= n) throw ContractError("edge endpoint out of range");
    if (e.weight && (!std::isfinite(*e.weight) || *e.weight < 0.0)) {
      throw ContractError("edge weight must be finite and non-negative");
    }
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.u, a.v) < std::tie(b.u, b.v);
  });
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (edges_[i].u == edges_[i - 1].u && edges_[i].v == edges_[i - 1].v) {
      throw ContractError("duplicate edge " + std::to_string(edges_[i].u) + "-" + std::to_string(edges_[i].v));
    }
  }
  adjacency_.resize(n);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    adjacency_[edges_[e].u].push_back({edges_[e].v, e});
    adjacency_[edges_[e].v].push_back({edges_[e].u, e});
  }
  for (auto& inc : adjacency_) {
    std::sort(inc.begin(), inc.end(), [](const Incidence& a, const Incidence& b) { return a.neighbor < b.neighbor; });
  }
}

std::optional<std::size_t> NGraph::find_edge(std::size_t a, std::size_t b) const {
  if (a >= size() || b >= size()) return std::nullopt;
  for (const auto& inc : adjacency_[a]) {
    if (inc.neighbor == b) return inc.edge;
  }
  return std::nullopt;
}

double NGraph::total_weight() const {
  double sum = 0.0;
  for (const auto& e : edges_) sum += e.weight.value_or(0.0);
  return sum;
}

Partition::Partition(const std::vector<std::size_t>& labels) : class_of_(labels.size()) {
  std::unordered_map<std::size_t, std::size_t> canonical;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = canonical.emplace(labels[i], i);
    class_of_[i] = it->second;
    classes_[it->second].push_back(i);
  }
}

bool Partition::refines(const Partition& coarser) const {
  if (coarser.size() != size()) return false;
  for (const auto& [id, members] : classes_) {
    const std::size_t target = coarser.class_of(members.front());
    for (auto m : members) {
      if (coarser.class_of(m) != target) return false;
    }
  }
  return true;
}

NGraph construct(std::vector<SpatialObject> objects, const NeighborPredicate& neighbor, std::string provenance) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    for (std::size_t j = i + 1; j < objects.size(); ++j) {
      if (neighbor(objects[i], objects[j])) edges.push_back({i, j, std::nullopt});
    }
  }
  return NGraph(std::move(objects), std::move(edges), std::move(provenance));
}

namespace {

struct CellKeyHash {
  std::size_t operator()(const std::pair<long long, long long>& k) const {
    return std::hash<long long>()(k.first * 1000003LL) ^ std::hash<long long>()(k.second);
  }
};

}  // namespace

NGraph construct_lattice_adjacency(std::vector<SpatialObject> objects) {
  std::unordered_map<std::pair<long long, long long>, std::vector<std::size_t>, CellKeyHash> cells;
  std::vector<std::pair<long long, long long>> keys(objects.size());
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const auto& o = objects[i];
    if (o.dim != 2 || o.point_count() == 0) throw ArgumentError("lattice adjacency needs 2D point objects");
    auto p = o.point(0);
    if (p[0] != std::floor(p[0]) || p[1] != std::floor(p[1])) {
      throw ArgumentError("lattice adjacency needs integer coordinates");
    }
    keys[i] = {static_cast<long long>(p[0]), static_cast<long long>(p[1])};
    cells[keys[i]].push_back(i);
  }
  std::vector<Edge> edges;
  static constexpr std::array<std::pair<int, int>, 4> offsets{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
  for (std::size_t i = 0; i < objects.size(); ++i) {
    for (auto [dr, dc] : offsets) {
      auto it = cells.find({keys[i].first + dr, keys[i].second + dc});
      if (it == cells.end()) continue;
      for (auto j : it->second) {
        if (j > i) edges.push_back({i, j, std::nullopt});
      }
    }
  }
  return NGraph(std::move(objects), std::move(edges), "4-adjacency");
}

NGraph construct_4adjacency(const GridField& field) {
  const std::size_t w = field.width();
  const std::size_t h = field.height();
  std::vector<Edge> edges;
  edges.reserve(w * (h - 1) + h * (w - 1));
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const std::size_t i = r * w + c;
      if (c + 1 < w) edges.push_back({i, i + 1, std::nullopt});
      if (r + 1 < h) edges.push_back({i, i + w, std::nullopt});
    }
  }
  return NGraph(field_cells(field), std::move(edges), "4-adjacency");
}

NGraph construct_knn(const PointSet& points, std::size_t k, const Metric& metric) {
  const std::size_t n = points.size();
  if (k >= n) throw ArgumentError("knn: k must be smaller than the number of points");
  std::map<std::pair<std::size_t, std::size_t>, double> chosen;
  std::vector<double> row(n);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) {
    metric.distances_from(points.point(i), points, row);
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
    order.erase(order.begin() + static_cast<std::ptrdiff_t>(i));
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t a, std::size_t b) { return std::tie(row[a], a) < std::tie(row[b], b); });
    for (std::size_t t = 0; t < k; ++t) {
      const std::size_t j = order[t];
      chosen.emplace(std::minmax(i, j), row[j]);
    }
  }
  std::vector<Edge> edges;
  edges.reserve(chosen.size());
  for (const auto& [key, w] : chosen) edges.push_back({key.first, key.second, w});
  return NGraph(points.objects(), std::move(edges), "knn");
}

NGraph construct_mst(const PointSet& points, const Metric& metric) {
  const std::size_t n = points.size();
  if (n == 0) throw ArgumentError("mst: empty point set");
  constexpr double inf = std::numeric_limits<double>::infinity();
  // Key of a vertex outside the tree: its cheapest connecting edge, ordered by
  // (weight, min index, max index) so the minimum tree is unique.
  using Key = std::tuple<double, std::size_t, std::size_t>;
  std::vector<Key> key(n, Key{inf, n, n});
  std::vector<std::size_t> parent(n, n);
  std::vector<bool> in_tree(n, false);
  std::vector<double> row(n);
  std::vector<Edge> edges;
  edges.reserve(n - 1);
  std::size_t current = 0;
  for (std::size_t step = 0; step < n; ++step) {
    in_tree[current] = true;
    if (parent[current] != n) edges.push_back({parent[current], current, std::get<0>(key[current])});
    metric.distances_from(points.point(current), points, row);
    std::size_t next = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (in_tree[v]) continue;
      const Key candidate{row[v], std::min(v, current), std::max(v, current)};
      if (candidate < key[v]) {
        key[v] = candidate;
        parent[v] = current;
      }
      if (next == n || key[v] < key[next]) next = v;
    }
    if (next == n) break;
    current = next;
  }
  return NGraph(points.objects(), std::move(edges), "mst");
}

namespace {

struct P2 {
  double x;
  double y;
};

double orient(const P2& a, const P2& b, const P2& c) { return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x); }

// > 0 when d lies inside the circumcircle of the counter-clockwise triangle abc.
double incircle(const P2& a, const P2& b, const P2& c, const P2& d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;
  const double ad = adx * adx + ady * ady;
  const double bd = bdx * bdx + bdy * bdy;
  const double cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

constexpr double kCollinearEps = 1e-12;
constexpr double kFlipEps = 1e-12;

class Triangulator {
 public:
  explicit Triangulator(std::vector<P2> pts) : pts_(std::move(pts)) {}

  std::vector<std::pair<std::size_t, std::size_t>> run() {
    const std::size_t n = pts_.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::tie(pts_[a].x, pts_[a].y, a) < std::tie(pts_[b].x, pts_[b].y, b);
    });
    std::size_t k = 2;
    while (k < n && std::fabs(orient(pts_[order[0]], pts_[order[1]], pts_[order[k]])) <= kCollinearEps) ++k;
    if (k == n) throw DegeneracyError("delaunay: all points are collinear");

    const std::size_t apex = order[k];
    for (std::size_t t = 0; t + 1 < k; ++t) add_triangle(order[t], order[t + 1], apex);
    std::vector<std::size_t> hull;
    if (orient(pts_[order[0]], pts_[order[1]], pts_[apex]) > 0) {
      for (std::size_t t = 0; t < k; ++t) hull.push_back(order[t]);
      hull.push_back(apex);
    } else {
      hull.push_back(order[0]);
      hull.push_back(apex);
      for (std::size_t t = k - 1; t >= 1; --t) hull.push_back(order[t]);
    }

    for (std::size_t m = k + 1; m < n; ++m) insert_outside(hull, order[m]);
    flip_all();

    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const auto& [key, tris] : edge_tris_) {
      if (!tris.empty()) out.push_back(key);
    }
    return out;
  }

 private:
  using Key = std::pair<std::size_t, std::size_t>;
  using Tri = std::array<std::size_t, 3>;

  static Key key(std::size_t a, std::size_t b) { return std::minmax(a, b); }

  void add_triangle(std::size_t a, std::size_t b, std::size_t c) {
    if (orient(pts_[a], pts_[b], pts_[c]) < 0) std::swap(a, b);
    const std::size_t id = tris_.size();
    tris_.push_back({a, b, c});
    alive_.push_back(true);
    for (auto [p, q] : {Key{a, b}, Key{b, c}, Key{c, a}}) edge_tris_[key(p, q)].push_back(id);
  }

  void remove_triangle(std::size_t id) {
    alive_[id] = false;
    const Tri& t = tris_[id];
    for (auto [p, q] : {Key{t[0], t[1]}, Key{t[1], t[2]}, Key{t[2], t[0]}}) {
      auto& v = edge_tris_[key(p, q)];
      v.erase(std::remove(v.begin(), v.end(), id), v.end());
    }
  }

  void insert_outside(std::vector<std::size_t>& hull, std::size_t p) {
    const std::size_t h = hull.size();
    std::vector<bool> visible(h);
    bool any = false;
    for (std::size_t i = 0; i < h; ++i) {
      visible[i] = orient(pts_[hull[i]], pts_[hull[(i + 1) % h]], pts_[p]) < 0;
      any = any || visible[i];
    }
    if (!any) throw DegeneracyError("delaunay: point not separable from hull (numerical degeneracy)");
    std::size_t start = 0;
    while (!(visible[start] && !visible[(start + h - 1) % h])) ++start;
    std::size_t count = 0;
    while (visible[(start + count) % h]) {
      const std::size_t i = (start + count) % h;
      add_triangle(hull[(i + 1) % h], hull[i], p);
      ++count;
    }
    // Drop hull vertices strictly inside the visible chain, put p in their place.
    std::vector<std::size_t> next;
    next.reserve(h + 1);
    for (std::size_t t = 0; t < h; ++t) {
      const std::size_t idx = (start + count + t) % h;
      next.push_back(hull[idx]);
      if (idx == start) break;
    }
    next.push_back(p);
    hull = std::move(next);
  }

  std::size_t opposite(std::size_t tri, std::size_t a, std::size_t b) const {
    for (auto v : tris_[tri]) {
      if (v != a && v != b) return v;
    }
    throw ContractError("delaunay: malformed triangle");
  }

  void flip_all() {
    std::vector<Key> stack;
    for (const auto& [k, tris] : edge_tris_) stack.push_back(k);
    while (!stack.empty()) {
      auto [a, b] = stack.back();
      stack.pop_back();
      auto it = edge_tris_.find(key(a, b));
      if (it == edge_tris_.end() || it->second.size() != 2) continue;
      const std::size_t t1 = it->second[0];
      const std::size_t t2 = it->second[1];
      const std::size_t c = opposite(t1, a, b);
      const std::size_t d = opposite(t2, a, b);
      const Tri& tri = tris_[t1];
      if (incircle(pts_[tri[0]], pts_[tri[1]], pts_[tri[2]], pts_[d]) <= kFlipEps) continue;
      remove_triangle(t1);
      remove_triangle(t2);
      add_triangle(c, d, a);
      add_triangle(d, c, b);
      for (Key e : {Key{a, c}, Key{c, b}, Key{b, d}, Key{d, a}}) stack.push_back(key(e.first, e.second));
    }
  }

  std::vector<P2> pts_;
  std::vector<Tri> tris_;
  std::vector<bool> alive_;
  std::map<Key, std::vector<std::size_t>> edge_tris_;
};

}  // namespace

NGraph construct_delaunay(const PointSet& points) {
  if (points.dim() != 2) throw ArgumentError("delaunay: points must be 2D");
  const std::size_t n = points.size();
  if (n < 3) throw DegeneracyError("delaunay: at least 3 points required");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(points.point(a)[0], points.point(a)[1]) < std::tie(points.point(b)[0], points.point(b)[1]);
  });
  for (std::size_t i = 1; i < n; ++i) {
    auto a = points.point(order[i - 1]);
    auto b = points.point(order[i]);
    if (a[0] == b[0] && a[1] == b[1]) throw DuplicateError("delaunay: duplicate points");
  }
  double minx = std::numeric_limits<double>::infinity(), miny = minx;
  double maxx = -minx, maxy = -minx;
  for (std::size_t i = 0; i < n; ++i) {
    auto p = points.point(i);
    minx = std::min(minx, p[0]);
    maxx = std::max(maxx, p[0]);
    miny = std::min(miny, p[1]);
    maxy = std::max(maxy, p[1]);
  }
  const double scale = std::max(maxx - minx, maxy - miny);
  std::vector<P2> normalized(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto p = points.point(i);
    normalized[i] = {(p[0] - minx) / scale, (p[1] - miny) / scale};
  }
  auto pairs = Triangulator(std::move(normalized)).run();
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  const Metric euclid = Metric::euclidean();
  for (auto [a, b] : pairs) edges.push_back({a, b, euclid(points.point(a), points.point(b))});
  return NGraph(points.objects(), std::move(edges), "delaunay");
}

NGraph construct_near(std::vector<SpatialObject> objects, double radius, bool inclusive, const Metric& metric) {
  if (!(radius >= 0.0)) throw ArgumentError("near: radius must be non-negative");
  auto within = [&](const SpatialObject& a, const SpatialObject& b) {
    if (a.dim != b.dim) return false;
    for (std::size_t i = 0; i < a.point_count(); ++i) {
      for (std::size_t j = 0; j < b.point_count(); ++j) {
        const double d = metric(a.point(i), b.point(j));
        if (inclusive ? d <= radius : d < radius) return true;
      }
    }
    return false;
  };
  return construct(std::move(objects), within, "near");
}

PointSet object_points(std::span<const SpatialObject> objects) {
  std::vector<double> coords;
  std::size_t dim = 2;
  if (!objects.empty()) dim = objects.front().dim;
  for (const auto& o : objects) {
    if (o.dim != dim || o.point_count() == 0) throw ArgumentError("objects must share a dimension and have geometry");
    auto p = o.point(0);
    coords.insert(coords.end(), p.begin(), p.end());
  }
  return PointSet(dim, std::move(coords));
}

NGraph graph_map(const NGraph& g, const std::function<SpatialObject(const SpatialObject&)>& proc) {
  std::vector<SpatialObject> nodes;
  nodes.reserve(g.size());
  for (const auto& n : g.nodes()) nodes.push_back(proc(n));
  return NGraph(std::move(nodes), g.edges(), g.provenance());
}

NGraph graph_map(const NGraph& g, const std::function<SpatialObject(const NGraph&, std::size_t)>& proc) {
  std::vector<SpatialObject> nodes;
  nodes.reserve(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) nodes.push_back(proc(g, i));
  return NGraph(std::move(nodes), g.edges(), g.provenance());
}

NGraph graph_filter(const NGraph& g, const std::function<bool(const SpatialObject&)>& mask) {
  constexpr std::size_t dropped = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> remap(g.size(), dropped);
  std::vector<SpatialObject> nodes;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!mask(g.node(i))) continue;
    remap[i] = nodes.size();
    SpatialObject o = g.node(i);
    if (!o.props.contains("origin")) o.props["origin"] = i;
    nodes.push_back(std::move(o));
  }
  std::vector<Edge> edges;
  for (const auto& e : g.edges()) {
    if (remap[e.u] != dropped && remap[e.v] != dropped) edges.push_back({remap[e.u], remap[e.v], e.weight});
  }
  return NGraph(std::move(nodes), std::move(edges), g.provenance());
}

Partition connected_components(const NGraph& g, const EdgePredicate& edge_pred) {
  const std::size_t n = g.size();
  constexpr std::size_t unset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> label(n, unset);
  std::deque<std::size_t> queue;
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (label[seed] != unset) continue;
    label[seed] = seed;
    queue.push_back(seed);
    while (!queue.empty()) {
      const std::size_t v = queue.front();
      queue.pop_front();
      for (const auto& inc : g.incident(v)) {
        if (label[inc.neighbor] != unset) continue;
        if (edge_pred && !edge_pred(g, g.edge(inc.edge))) continue;
        label[inc.neighbor] = seed;
        queue.push_back(inc.neighbor);
      }
    }
  }
  return Partition(label);
}

std::vector<std::size_t> inconsistent_edges(const NGraph& tree, double k_sigma, std::size_t depth, double min_ratio) {
  if (tree.empty()) return {};
  if (tree.edge_count() != tree.size() - 1 || connected_components(tree).class_count() != 1) {
    throw ArgumentError("inconsistent_edges: graph is not a spanning tree");
  }
  for (const auto& e : tree.edges()) {
    if (!e.weight) throw ArgumentError("inconsistent_edges: tree edges must be weighted");
  }
  std::vector<std::size_t> flagged;
  std::vector<std::size_t> hop(tree.size());
  std::vector<bool> edge_seen(tree.edge_count());
  constexpr std::size_t far = std::numeric_limits<std::size_t>::max();
  for (std::size_t e = 0; e < tree.edge_count(); ++e) {
    const Edge& edge = tree.edge(e);
    std::fill(hop.begin(), hop.end(), far);
    std::fill(edge_seen.begin(), edge_seen.end(), false);
    edge_seen[e] = true;
    std::deque<std::size_t> queue{edge.u, edge.v};
    hop[edge.u] = hop[edge.v] = 0;
    std::vector<double> nearby;
    while (!queue.empty()) {
      const std::size_t v = queue.front();
      queue.pop_front();
      if (hop[v] + 1 > depth) continue;
      for (const auto& inc : tree.incident(v)) {
        if (edge_seen[inc.edge]) continue;
        edge_seen[inc.edge] = true;
        nearby.push_back(*tree.edge(inc.edge).weight);
        if (hop[inc.neighbor] == far) {
          hop[inc.neighbor] = hop[v] + 1;
          queue.push_back(inc.neighbor);
        }
      }
    }
    if (nearby.size() < 2) continue;
    const double mean = std::accumulate(nearby.begin(), nearby.end(), 0.0) / static_cast<double>(nearby.size());
    double var = 0.0;
    for (double w : nearby) var += (w - mean) * (w - mean);
    const double sd = std::sqrt(var / static_cast<double>(nearby.size()));
    const double w = *edge.weight;
    // 1e-9 relative slack keeps rounding in `mean` from flagging equal weights.
    auto mid = nearby.begin() + static_cast<std::ptrdiff_t>(nearby.size() / 2);
    std::nth_element(nearby.begin(), mid, nearby.end());
    double median = *mid;
    if (nearby.size() % 2 == 0) median = 0.5 * (median + *std::max_element(nearby.begin(), mid));
    if (w > mean + k_sigma * sd + 1e-9 * mean && w > min_ratio * median) flagged.push_back(e);
  }
  return flagged;
}

nlohmann::json to_json(const NGraph& g) {
  nlohmann::json nodes = nlohmann::json::array();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& o = g.node(i);
    nlohmann::json geom = nlohmann::json::array();
    for (std::size_t p = 0; p < o.point_count(); ++p) {
      auto pt = o.point(p);
      geom.push_back(std::vector<double>(pt.begin(), pt.end()));
    }
    nodes.push_back({{"id", i}, {"kind", o.kind}, {"geom", std::move(geom)}, {"props", o.props}});
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : g.edges()) {
    nlohmann::json row = {e.u, e.v};
    if (e.weight) row.push_back(*e.weight);
    edges.push_back(std::move(row));
  }
  return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

}  // namespace spagg
