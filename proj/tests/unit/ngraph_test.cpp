#include <algorithm>
#include <fstream>
#include <random>

#include "doctest.h"
#include "spagg/errors.hpp"
#include "spagg/ngraph.hpp"
#include "support/oracles.hpp"

using namespace spagg;

namespace {

PointSet random_points(std::mt19937_64& rng, std::size_t n, double extent = 100.0) {
  std::uniform_real_distribution<double> u(0.0, extent);
  std::vector<double> xy(2 * n);
  for (auto& v : xy) v = u(rng);
  return PointSet(2, xy);
}

std::vector<double> coords_of(const PointSet& p) { return {p.coords().begin(), p.coords().end()}; }

std::vector<std::pair<std::size_t, std::size_t>> edge_pairs(const NGraph& g) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& e : g.edges()) out.emplace_back(e.u, e.v);
  return out;
}

bool is_spanning_tree(const NGraph& g) {
  if (g.edge_count() + 1 != g.size()) return false;
  oracle::UnionFind uf(g.size());
  for (const auto& e : g.edges()) {
    if (uf.find(e.u) == uf.find(e.v)) return false;
    uf.unite(e.u, e.v);
  }
  return true;
}

}  // namespace

TEST_SUITE("ngraph") {

TEST_CASE("edges are normalised and sorted") {
  std::vector<SpatialObject> nodes(3, make_point_object("point", {0, 0}));
  const NGraph g(nodes, {{2, 1, 1.0}, {1, 0, std::nullopt}}, "test");
  REQUIRE(g.edge_count() == 2);
  CHECK(g.edge(0) == Edge{0, 1, std::nullopt});
  CHECK(g.edge(1) == Edge{1, 2, 1.0});
  CHECK(g.degree(1) == 2);
  CHECK(g.find_edge(2, 1) == 1);
  CHECK_FALSE(g.find_edge(0, 2));
  CHECK_THROWS_AS(NGraph(nodes, {{0, 0}}, "t"), ContractError);
  CHECK_THROWS_AS(NGraph(nodes, {{0, 3}}, "t"), ContractError);
  CHECK_THROWS_AS(NGraph(nodes, {{0, 1}, {1, 0}}, "t"), ContractError);
  CHECK_THROWS_AS(NGraph(nodes, {{0, 1, -1.0}}, "t"), ContractError);
}

TEST_CASE("partition ids are the smallest member") {
  const Partition p({7, 3, 7, 3, 9});
  CHECK(p.class_of(0) == 0);
  CHECK(p.class_of(1) == 1);
  CHECK(p.class_of(3) == 1);
  CHECK(p.class_of(4) == 4);
  CHECK(p.class_count() == 3);
  CHECK(Partition({0, 1, 1, 3, 4}).refines(p) == false);
  CHECK(Partition({0, 1, 2, 1, 4}).refines(p));
}

TEST_CASE("4-adjacency on the paper bitmap") {
  std::ifstream in(SPAGG_SOURCE_DIR "/data/paper_bitmap.txt");
  const GridField field = load_grid_text(in);
  const NGraph g = construct_4adjacency(field);
  CHECK(g.size() == 180);
  CHECK(g.edge_count() == 12 * 14 + 11 * 15);
  CHECK(g.provenance() == "4-adjacency");
  const NGraph same = construct(field_cells(field), [](const SpatialObject& a, const SpatialObject& b) {
    const long dr = a.props["row"].get<long>() - b.props["row"].get<long>();
    const long dc = a.props["col"].get<long>() - b.props["col"].get<long>();
    return std::abs(dr) + std::abs(dc) == 1;
  });
  CHECK(edge_pairs(same) == edge_pairs(g));
}

TEST_CASE("construct is independent of input order") {
  std::mt19937_64 rng(3);
  const PointSet pts = random_points(rng, 30);
  auto objects = pts.objects();
  auto near = [](const SpatialObject& a, const SpatialObject& b) {
    return Metric::euclidean()(a.point(0), b.point(0)) < 25.0;
  };
  const NGraph g = construct(objects, near);
  std::vector<std::size_t> perm(objects.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<SpatialObject> shuffled;
  for (auto i : perm) shuffled.push_back(objects[i]);
  const NGraph h = construct(shuffled, near);
  std::set<std::pair<std::size_t, std::size_t>> a, b;
  for (const auto& e : g.edges()) a.emplace(e.u, e.v);
  for (const auto& e : h.edges()) b.emplace(std::min(perm[e.u], perm[e.v]), std::max(perm[e.u], perm[e.v]));
  CHECK(a == b);
}

TEST_CASE("mst matches exhaustive enumeration for small sets") {
  std::mt19937_64 rng(5);
  for (std::size_t n = 1; n <= 7; ++n) {
    const PointSet pts = random_points(rng, n);
    const NGraph t = construct_mst(pts, Metric::euclidean());
    CHECK(is_spanning_tree(t));
    CHECK(t.total_weight() == doctest::Approx(oracle::exhaustive_mst_weight(coords_of(pts))).epsilon(1e-12));
  }
}

TEST_CASE("mst beats random spanning trees") {
  std::mt19937_64 rng(8);
  const PointSet pts = random_points(rng, 40);
  const double w = construct_mst(pts, Metric::euclidean()).total_weight();
  const auto xy = coords_of(pts);
  for (int trial = 0; trial < 100; ++trial) {
    // Random tree: attach each node to a random earlier node of a shuffled order.
    std::vector<std::size_t> order(pts.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0;
    for (std::size_t i = 1; i < order.size(); ++i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      total += oracle::dist2d(xy, order[i], order[pick(rng)]);
    }
    CHECK(w <= total);
  }
}

TEST_CASE("mst ties break by index") {
  const PointSet square(2, {0, 0, 1, 0, 1, 1, 0, 1});
  const NGraph t = construct_mst(square, Metric::euclidean());
  CHECK(edge_pairs(t) == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {0, 3}, {1, 2}});
}

TEST_CASE("knn degree and errors") {
  std::mt19937_64 rng(9);
  const PointSet pts = random_points(rng, 25);
  for (std::size_t k : {1, 3, 6}) {
    const NGraph g = construct_knn(pts, k, Metric::euclidean());
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(g.degree(i) >= k);
  }
  CHECK_THROWS_AS(construct_knn(PointSet(2, {0, 0, 1, 1}), 2, Metric::euclidean()), ArgumentError);
}

TEST_CASE("knn links every point to its nearest neighbour") {
  std::mt19937_64 rng(10);
  const PointSet pts = random_points(rng, 40);
  const NGraph g = construct_knn(pts, 1, Metric::euclidean());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::size_t best = i == 0 ? 1 : 0;
    auto d2 = [&](std::size_t j) {
      const double dx = pts.point(i)[0] - pts.point(j)[0], dy = pts.point(i)[1] - pts.point(j)[1];
      return dx * dx + dy * dy;
    };
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (j != i && d2(j) < d2(best)) best = j;
    CHECK(g.find_edge(i, best).has_value());
  }
}

TEST_CASE("delaunay of a square with a centre point") {
  const PointSet pts(2, {0, 0, 2, 0, 2, 2, 0, 2, 1, 1});
  const NGraph g = construct_delaunay(pts);
  CHECK(g.edge_count() == 8);
  CHECK(g.degree(4) == 4);
}

TEST_CASE("delaunay cocircular square keeps one diagonal") {
  const NGraph g = construct_delaunay(PointSet(2, {0, 0, 1, 0, 1, 1, 0, 1}));
  CHECK(g.edge_count() == 5);
}

TEST_CASE("delaunay empty circumcircles and face count") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const PointSet pts = random_points(rng, 40, 1.0);
    const auto xy = coords_of(pts);
    const NGraph g = construct_delaunay(pts);
    const auto faces = oracle::triangle_faces(xy, edge_pairs(g));
    CHECK(faces.size() == 2 * pts.size() - 2 - oracle::hull_size(xy));
    for (const auto& t : faces) {
      for (std::size_t d = 0; d < pts.size(); ++d) {
        if (d == t[0] || d == t[1] || d == t[2]) continue;
        CHECK(oracle::incircle(&xy[2 * t[0]], &xy[2 * t[1]], &xy[2 * t[2]], &xy[2 * d]) <= 1e-9L);
      }
    }
  }
}

TEST_CASE("delaunay errors") {
  CHECK_THROWS_AS(construct_delaunay(PointSet(2, {0, 0, 1, 1})), DegeneracyError);
  CHECK_THROWS_AS(construct_delaunay(PointSet(2, {0, 0, 1, 1, 2, 2, 3, 3})), DegeneracyError);
  CHECK_THROWS_AS(construct_delaunay(PointSet(2, {0, 0, 1, 0, 0, 1, 1, 0})), DuplicateError);
  CHECK_THROWS_AS(construct_delaunay(PointSet(3, {0, 0, 0, 1, 0, 0, 0, 1, 0})), ArgumentError);
}

TEST_CASE("near uses minimum point distance, strict by default") {
  SpatialObject a = make_point_object("s", {0, 0});
  a.add_point(std::array<double, 2>{0, 1});
  const SpatialObject b = make_point_object("s", {2, 1});
  CHECK(construct_near({a, b}, 2.0).edge_count() == 0);
  CHECK(construct_near({a, b}, 2.0, true).edge_count() == 1);
  CHECK(construct_near({a, b}, 2.5).edge_count() == 1);
}

TEST_CASE("map and filter") {
  const PointSet pts(2, {0, 0, 1, 0, 2, 0, 3, 0});
  const NGraph g = construct_mst(pts, Metric::euclidean());
  const NGraph m = graph_map(g, [](const SpatialObject& o) {
    SpatialObject c = o;
    c.props["x"] = o.point(0)[0];
    return c;
  });
  CHECK(m.edges() == g.edges());
  CHECK(m.node(2).props["x"] == 2.0);
  auto keep = [](const SpatialObject& o) { return o.point(0)[0] != 1.0; };
  const NGraph f = graph_filter(g, keep);
  CHECK(f.size() == 3);
  CHECK(f.edge_count() == 1);
  CHECK(f.node(1).props["origin"] == 2);
  const NGraph ff = graph_filter(f, keep);
  CHECK(ff.same_structure(f));
}

TEST_CASE("connected components agree with union-find") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + trial * 2;
    const auto edges = oracle::random_graph(rng, n, 0.1, 5);
    std::vector<Edge> es;
    oracle::UnionFind uf(n);
    for (const auto& e : edges) {
      es.push_back({e.u, e.v, e.w});
      uf.unite(e.u, e.v);
    }
    const NGraph g(std::vector<SpatialObject>(n, make_point_object("p", {0, 0})), es, "random");
    CHECK(connected_components(g).class_of() == uf.labels());
  }
}

TEST_CASE("inconsistent edges") {
  SUBCASE("uniform spacing flags nothing") {
    std::vector<double> xy;
    for (int i = 0; i < 12; ++i) xy.insert(xy.end(), {0.1 * i, 0.0});
    CHECK(inconsistent_edges(construct_mst(PointSet(2, xy), Metric::euclidean())).empty());
  }
  SUBCASE("two clusters joined by a bridge") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> jitter(-0.05, 0.05);
    std::vector<double> xy;
    for (int c = 0; c < 2; ++c)
      for (int i = 0; i < 10; ++i) xy.insert(xy.end(), {c * 29.0 + i + jitter(rng), jitter(rng)});
    const NGraph t = construct_mst(PointSet(2, xy), Metric::euclidean());
    const auto flagged = inconsistent_edges(t, 2.0, 2, 2.0);
    REQUIRE(flagged.size() == 1);
    CHECK(*t.edge(flagged[0]).weight == doctest::Approx(20.0).epsilon(0.02));
    // Without the ratio, jitter alone exceeds mean + 2 sd on some unit edges.
    const auto plain = inconsistent_edges(t, 2.0, 2);
    CHECK(std::find(plain.begin(), plain.end(), flagged[0]) != plain.end());
  }
  SUBCASE("single edge has too few neighbours") {
    CHECK(inconsistent_edges(construct_mst(PointSet(2, {0, 0, 5, 5}), Metric::euclidean())).empty());
  }
  SUBCASE("needs a weighted spanning tree") {
    std::vector<SpatialObject> nodes(3, make_point_object("p", {0, 0}));
    CHECK_THROWS_AS(inconsistent_edges(NGraph(nodes, {{0, 1, 1.0}}, "t")), ArgumentError);
    CHECK_THROWS_AS(inconsistent_edges(NGraph(nodes, {{0, 1}, {1, 2}}, "t")), ArgumentError);
  }
}

TEST_CASE("graph json") {
  const NGraph g = construct_mst(PointSet(2, {0, 0, 3, 4}), Metric::euclidean());
  const auto j = to_json(g);
  CHECK(j["nodes"].size() == 2);
  CHECK(j["edges"][0] == nlohmann::json::array({0, 1, 5.0}));
}

}
