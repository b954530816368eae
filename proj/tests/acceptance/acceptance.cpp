// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances and seeds are fixed below.

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <regex>
#include <sstream>
#include <string>

#include "spagg/geometry.hpp"
#include "spagg/ngraph.hpp"
#include "spagg/operators.hpp"
#include "spagg/pipelines.hpp"
#include "support/oracles.hpp"
#include "support/orbit_gen.hpp"

using namespace spagg;

namespace {

constexpr double kMstTolerance = 1e-9;
constexpr long double kIncircleTolerance = 1e-9L;
constexpr double kLinearityTolerance = 1e-12;
constexpr double kOrbitAccuracy = 0.95;
constexpr std::uint64_t kSeed = 20240601;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << " failed: ";
      else detail << "; ";
      detail << what;
      pass = false;
    }
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<double> uniform(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

NGraph graph_of(std::size_t n, const std::vector<oracle::WEdge>& edges) {
  std::vector<Edge> es;
  for (const auto& e : edges) es.push_back({e.u, e.v, e.w});
  return NGraph(std::vector<SpatialObject>(n, make_point_object("node", {0, 0})), es, "random");
}

// 1. Golden run on the printed bitmap.
Verdict golden_trace() {
  Verdict v;
  const std::string bitmap_path = SPAGG_SOURCE_DIR "/data/paper_bitmap.txt";
  const GridField grid = load_grid_text(slurp(bitmap_path));
  std::vector<std::vector<int>> bits(grid.height(), std::vector<int>(grid.width()));
  for (std::size_t r = 0; r < grid.height(); ++r)
    for (std::size_t c = 0; c < grid.width(); ++c) bits[r][c] = static_cast<int>(grid.at(r, c));
  const auto facts = oracle::bitmap_facts(bits);
  const auto result = pipelines::trace_boundaries(grid);

  const std::vector<geom::Point2> want_junctions{{4, 6}, {7, 3}};
  v.require(result.junctions == want_junctions, "junctions differ from (4,6),(7,3)");
  v.require(facts.junctions == std::vector<std::pair<std::size_t, std::size_t>>{{4, 6}, {7, 3}},
            "oracle junctions differ from (4,6),(7,3)");
  v.require(result.multi_pixel_segments() == facts.multi_pixel_segments, "segment count disagrees with oracle");
  v.require(result.multi_pixel_segments() == 4, "multi-pixel segments = " +
                                                    std::to_string(result.multi_pixel_segments()) +
                                                    " (flood-fill oracle: " +
                                                    std::to_string(facts.multi_pixel_segments) + "), expected 4");
  v.require(result.contours.size() == 2, "contours != 2");
  v.require(result.legal_contours() == 2, "legal contours != 2");
  const std::string golden = slurp(SPAGG_SOURCE_DIR "/tests/golden/paper_bitmap_trace.json");
  v.require(!golden.empty() && pipelines::to_json(result).dump() + "\n" == golden, "output differs from golden JSON");
  v.detail << " [junctions=" << result.junctions.size() << " segments=" << result.multi_pixel_segments()
           << " contours=" << result.contours.size() << " legal=" << result.legal_contours() << "]";
  return v;
}

// 2. MST against exhaustive enumeration, plus tree invariants at scale.
Verdict mst_oracle() {
  Verdict v;
  std::mt19937_64 rng(kSeed + 2);
  std::uniform_int_distribution<std::size_t> size(2, 9);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto xy = uniform(rng, 2 * size(rng), 0, 10);
    const double got = construct_mst(PointSet(2, xy), Metric::euclidean()).total_weight();
    worst = std::max(worst, std::abs(got - oracle::exhaustive_mst_weight(xy)));
  }
  v.require(worst <= kMstTolerance, "max weight error " + std::to_string(worst));
  for (std::size_t n : {10, 100, 500, 1000}) {
    const NGraph t = construct_mst(PointSet(2, uniform(rng, 2 * n, 0, 1)), Metric::euclidean());
    oracle::UnionFind uf(n);
    bool acyclic = true;
    for (const auto& e : t.edges()) {
      acyclic = acyclic && uf.find(e.u) != uf.find(e.v);
      uf.unite(e.u, e.v);
    }
    const auto labels = uf.labels();
    const bool connected = std::all_of(labels.begin(), labels.end(), [](auto l) { return l == 0; });
    v.require(t.edge_count() == n - 1 && acyclic && connected, "tree invariants fail at n=" + std::to_string(n));
  }
  v.detail << " [max |w - w_exhaustive| = " << worst << "]";
  return v;
}

// 3. Delaunay empty circumcircles and rigid-motion invariance.
Verdict delaunay_property() {
  Verdict v;
  std::mt19937_64 rng(kSeed + 3);
  std::uniform_real_distribution<double> u(0, 1);
  long double worst = -1;
  for (int trial = 0; trial < 50; ++trial) {
    const auto xy = uniform(rng, 60, -50, 50);
    const NGraph g = construct_delaunay(PointSet(2, xy));
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (const auto& e : g.edges()) edges.emplace_back(e.u, e.v);

    std::vector<double> norm(xy);
    for (auto& x : norm) x = (x + 50) / 100;
    const auto faces = oracle::triangle_faces(norm, edges);
    v.require(faces.size() == 2 * 30 - 2 - oracle::hull_size(norm), "not a full triangulation");
    for (const auto& t : faces)
      for (std::size_t d = 0; d < 30; ++d) {
        if (d == t[0] || d == t[1] || d == t[2]) continue;
        worst = std::max(worst, oracle::incircle(&norm[2 * t[0]], &norm[2 * t[1]], &norm[2 * t[2]], &norm[2 * d]));
      }

    const double angle = 2 * std::numbers::pi * u(rng), tx = 1000 * u(rng), ty = -1000 * u(rng);
    std::vector<double> moved(xy.size());
    for (std::size_t i = 0; i < 30; ++i) {
      moved[2 * i] = std::cos(angle) * xy[2 * i] - std::sin(angle) * xy[2 * i + 1] + tx;
      moved[2 * i + 1] = std::sin(angle) * xy[2 * i] + std::cos(angle) * xy[2 * i + 1] + ty;
    }
    const NGraph h = construct_delaunay(PointSet(2, moved));
    std::vector<std::pair<std::size_t, std::size_t>> moved_edges;
    for (const auto& e : h.edges()) moved_edges.emplace_back(e.u, e.v);
    v.require(moved_edges == edges, "edge set changed under rigid motion (trial " + std::to_string(trial) + ")");
  }
  v.require(worst <= kIncircleTolerance, "circumcircle violated");
  v.detail << " [max incircle det = " << static_cast<double>(worst) << "]";
  return v;
}

// 4. classify against union-find with a threshold sweep.
Verdict classify_oracle() {
  Verdict v;
  std::mt19937_64 rng(kSeed + 4);
  std::uniform_int_distribution<std::size_t> size(1, 50);
  ClassRules rules("all");
  rules.add("all", [](const ClassView&) { return true; }, "class");
  auto weight = [](const NGraph&, const Edge& e) { return *e.weight; };
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = size(rng);
    const auto edges = oracle::random_graph(rng, n, 3.0 / static_cast<double>(n), 10);
    const NGraph g = graph_of(n, edges);
    std::optional<Partition> previous;
    for (double t : {1.0, 3.0, 5.0, 7.0, 9.0}) {
      oracle::UnionFind uf(n);
      for (const auto& e : edges)
        if (e.w <= t) uf.unite(e.u, e.v);
      const auto lp = classify(g, weight, t, rules);
      v.require(lp.partition.class_of() == uf.labels(), "partition differs from union-find");
      if (previous) v.require(previous->refines(lp.partition), "threshold sweep not monotone");
      previous = lp.partition;
    }
  }
  return v;
}

// 5. search against BFS and Floyd-Warshall.
Verdict search_oracle() {
  Verdict v;
  std::mt19937_64 rng(kSeed + 5);
  std::uniform_int_distribution<std::size_t> size(2, 20);
  std::size_t paths = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = size(rng);
    const auto edges = oracle::random_graph(rng, n, 0.2, 20);
    const NGraph g = graph_of(n, edges);
    const auto fw = oracle::floyd_warshall(n, edges);
    auto any = [](const NGraph&, std::size_t) { return true; };
    for (std::size_t s = 0; s < n; ++s) {
      const auto hops = oracle::bfs_hops(n, edges, {s});
      const auto fifo = search(g, {s}, any, Frontier::fifo);
      const auto prio = search(g, {s}, any, Frontier::priority);
      const auto reachable = static_cast<std::size_t>(std::count_if(hops.begin(), hops.end(), [](auto h) { return h.has_value(); }));
      v.require(fifo.size() == reachable && prio.size() == reachable, "reachable set differs");
      for (const auto& p : fifo) v.require(p.hops() == *hops[p.nodes.back()], "fifo length differs from BFS");
      for (const auto& p : prio) v.require(p.cost == fw[s][p.nodes.back()], "priority cost differs from Floyd-Warshall");
      paths += fifo.size() + prio.size();
    }
  }
  v.detail << " [" << paths << " paths checked]";
  return v;
}

// 6. convolve against the naive loop, and linearity.
Verdict convolve_oracle() {
  Verdict v;
  std::mt19937_64 rng(kSeed + 6);
  std::uniform_int_distribution<std::size_t> side(1, 64), half(0, 3);
  std::uniform_real_distribution<double> u(-2, 2);
  double worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t w = side(rng), h = side(rng), mw = 2 * half(rng) + 1, mh = 2 * half(rng) + 1;
    const auto values = uniform(rng, w * h, -1, 1);
    const GridField f(w, h, 1, values);
    const geom::Mask m1{mw, mh, uniform(rng, mw * mh, -1, 1)}, m2{mw, mh, uniform(rng, mw * mh, -1, 1)};
    const GridField out = geom::convolve(f, m1);
    v.require(std::equal(out.values().begin(), out.values().end(),
                         oracle::naive_correlate(values, w, h, m1.values, mw, mh).begin()),
              "differs from naive loop");
    const double a = u(rng), b = u(rng);
    geom::Mask mix{mw, mh, {}};
    for (std::size_t i = 0; i < mw * mh; ++i) mix.values.push_back(a * m1.values[i] + b * m2.values[i]);
    const GridField lhs = geom::convolve(f, mix), r1 = out, r2 = geom::convolve(f, m2);
    for (std::size_t i = 0; i < w * h; ++i) {
      worst = std::max(worst, std::abs(lhs.values()[i] - (a * r1.values()[i] + b * r2.values()[i])));
    }
  }
  v.require(worst <= kLinearityTolerance, "linearity error " + std::to_string(worst));
  v.detail << " [max linearity error = " << worst << "]";
  return v;
}

// 7. coboundary(boundary(R)) = R on random filled rectangles.
Verdict delta_boundary_identity() {
  Verdict v;
  std::mt19937_64 rng(kSeed + 7);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<long> grid(2, 64);
    const long gw = grid(rng), gh = grid(rng);
    // Sides of at least 2 so that the boundary is a closed curve.
    const long w = std::uniform_int_distribution<long>(2, gw)(rng), h = std::uniform_int_distribution<long>(2, gh)(rng);
    const long c0 = std::uniform_int_distribution<long>(0, gw - w)(rng), r0 = std::uniform_int_distribution<long>(0, gh - h)(rng);
    geom::PixelSet rect;
    for (long r = r0; r < r0 + h; ++r)
      for (long c = c0; c < c0 + w; ++c) rect.insert({r, c});
    v.require(geom::coboundary(geom::boundary(rect)) == rect, "identity fails for " + std::to_string(h) + "x" + std::to_string(w));
  }
  return v;
}

// 8. Orbit labels on the seeded corpus, and their invariance.
Verdict orbit_classifier() {
  Verdict v;
  const auto corpus = testing::orbit_corpus(kSeed + 8);
  std::mt19937_64 rng(kSeed + 9);
  std::uniform_real_distribution<double> u(0, 1);
  std::size_t correct = 0, invariant = 0;
  for (const auto& s : corpus) {
    const auto r = pipelines::classify_orbit(s.points());
    const bool ok = pipelines::to_string(r.label) == s.label &&
                    (r.label != pipelines::OrbitType::island_chain || r.cluster_count == s.clusters);
    correct += ok;
    const auto m = testing::moved(s, 2 * std::numbers::pi * u(rng), std::pow(10.0, -2 + 4 * u(rng)),
                                  -100 + 200 * u(rng), -100 + 200 * u(rng));
    const auto rm = pipelines::classify_orbit(m.points());
    invariant += rm.label == r.label && rm.cluster_count == r.cluster_count;
  }
  const double accuracy = static_cast<double>(correct) / static_cast<double>(corpus.size());
  v.require(accuracy >= kOrbitAccuracy, "accuracy below 95%");
  v.require(invariant == corpus.size(), "label changed under rigid motion + scaling");
  v.detail << " [correct " << correct << "/" << corpus.size() << ", invariant " << invariant << "/" << corpus.size() << "]";
  return v;
}

// 9. Both tracer layers are aggregate -> classify -> redescribe calls.
Verdict layer_uniformity() {
  Verdict v;
  OperatorTrace trace;
  pipelines::trace_boundaries(load_grid_text(slurp(SPAGG_SOURCE_DIR "/data/paper_bitmap.txt")), {}, &trace);
  const std::vector<std::string> want{"aggregate:4-adjacency", "classify", "redescribe",
                                      "aggregate:near",        "classify", "redescribe"};
  v.require(trace.calls == want, "operator call sequence differs");
  const Layer pixels = pipelines::pixel_layer({}), segments = pipelines::segment_layer({});
  v.require(pixels.combiner.build && segments.combiner.build && pixels.dissimilarity && segments.dissimilarity,
            "layer missing combiner or dissimilarity");
  // No pipeline-private graph building or clustering in the tracer source.
  const std::string source = slurp(SPAGG_SOURCE_DIR "/src/pipelines/tracer.cpp");
  const std::regex forbidden(R"(\b(construct\w*|connected_components|Partition|UnionFind|union_find)\s*[\(\{<])");
  v.require(!source.empty() && !std::regex_search(source, forbidden), "tracer bypasses the operator module");
  std::size_t runs = 0;
  for (auto pos = source.find("run_layer("); pos != std::string::npos; pos = source.find("run_layer(", pos + 1)) ++runs;
  v.require(runs == 2, "expected both layers to go through run_layer");
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"golden trace of the printed bitmap", golden_trace},
      {"mst equals exhaustive spanning-tree optimum", mst_oracle},
      {"delaunay empty circumcircles, rigid-motion invariant", delaunay_property},
      {"classify equals union-find, monotone in threshold", classify_oracle},
      {"search equals BFS / Floyd-Warshall", search_oracle},
      {"convolve equals naive loop, linear", convolve_oracle},
      {"coboundary(boundary(R)) = R", delta_boundary_identity},
      {"orbit classifier accuracy and invariance", orbit_classifier},
      {"tracer layers share one operator structure", layer_uniformity},
  };
  int failures = 0;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    failures += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " " << i + 1 << " " << criteria[i].first << v.detail.str() << " ("
              << static_cast<long>(ms) << " ms)\n";
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << criteria.size() - static_cast<std::size_t>(failures) << "/" << criteria.size() << " criteria passed in "
            << total << " s\n";
  return failures == 0 ? 0 : 1;
}
