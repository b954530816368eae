// Boundary tracer built from two identical aggregate -> classify ->
// redescribe layers: pixels to boundary segments, segments to contours.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "spagg/errors.hpp"
#include "spagg/pipelines.hpp"

namespace spagg::pipelines {

using geom::Point2;

void TracerParams::validate() const {
  if (!(threshold1 > 0) || !(threshold2 > 0) || !(separation > 0) || !(delta > 0)) {
    throw ArgumentError("tracer thresholds and distances must be positive");
  }
  if (!(epsilon > 0 && epsilon < 90)) throw ArgumentError("epsilon must lie in (0, 90) degrees");
  if (tangent_window < 2) throw ArgumentError("tangent_window must be at least 2");
}

std::size_t TraceResult::multi_pixel_segments() const {
  return static_cast<std::size_t>(
      std::count_if(segments.begin(), segments.end(), [](const Segment& s) { return s.size() > 1; }));
}

std::size_t TraceResult::legal_contours() const {
  return static_cast<std::size_t>(std::count_if(contours.begin(), contours.end(), [](const Contour& c) { return c.legal; }));
}

bool is_junction(const GridField& grid, std::size_t row, std::size_t col) {
  if (grid.at(row, col) != 1.0) return false;
  int ones = 0;
  if (row > 0 && grid.at(row - 1, col) == 1.0) ++ones;
  if (row + 1 < grid.height() && grid.at(row + 1, col) == 1.0) ++ones;
  if (col > 0 && grid.at(row, col - 1) == 1.0) ++ones;
  if (col + 1 < grid.width() && grid.at(row, col + 1) == 1.0) ++ones;
  return ones > 2;
}

namespace {

// Least-squares direction of the straight run of up to `window` pixels that
// ends at points[end], oriented to point out of the segment.
Point2 end_tangent(const std::vector<Point2>& points, bool at_front, std::size_t window) {
  const std::size_t n = points.size();
  auto at = [&](std::size_t k) { return at_front ? points[k] : points[n - 1 - k]; };
  std::vector<Point2> run{at(0), at(1)};
  const Point2 step = at(0) - at(1);
  for (std::size_t k = 2; k < std::min(window, n); ++k) {
    if (!(at(k - 1) - at(k) == step)) break;
    run.push_back(at(k));
  }
  Point2 mean{};
  for (auto p : run) mean = mean + (1.0 / static_cast<double>(run.size())) * p;
  double sxx = 0, syy = 0, sxy = 0;
  for (auto p : run) {
    const Point2 d = p - mean;
    sxx += d.x * d.x;
    syy += d.y * d.y;
    sxy += d.x * d.y;
  }
  const double angle = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
  Point2 dir{std::cos(angle), std::sin(angle)};
  if (geom::dot(dir, at(0) - run.back()) < 0) dir = -1.0 * dir;
  return dir;
}

double tangent_angle_deg(Point2 a, Point2 b) {
  const double c = std::clamp(std::fabs(geom::dot(a, b)), 0.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

struct EndPair {
  double gap;
  int end_a;
  int end_b;
};

std::optional<EndPair> best_colinear_ends(const Segment& a, const Segment& b, double delta, double epsilon) {
  if (a.size() < 2 || b.size() < 2 || !a.tangents || !b.tangents) return std::nullopt;
  std::optional<EndPair> best;
  for (int i = 0; i < 2; ++i) {
    const Point2 pa = i == 0 ? a.points.front() : a.points.back();
    for (int j = 0; j < 2; ++j) {
      const Point2 pb = j == 0 ? b.points.front() : b.points.back();
      const double gap = geom::distance(pa, pb);
      if (gap > delta) continue;
      if (tangent_angle_deg((*a.tangents)[i], (*b.tangents)[j]) > epsilon) continue;
      if (!best || gap < best->gap) best = EndPair{gap, i, j};
    }
  }
  return best;
}

// segment/create: order the class pixels into a path and fit end tangents.
DescriptionType segment_description(std::size_t tangent_window) {
  return [tangent_window](const ClassView& view) {
    const NGraph& g = view.graph;
    const auto& members = view.members;
    std::vector<bool> in_class(g.size(), false);
    for (auto m : members) in_class[m] = true;
    auto class_neighbours = [&](std::size_t v) {
      std::vector<std::size_t> out;
      for (const auto& inc : g.incident(v)) {
        if (in_class[inc.neighbor]) out.push_back(inc.neighbor);
      }
      return out;
    };
    std::size_t start = members.front();
    bool has_end = false;
    for (auto m : members) {
      if (class_neighbours(m).size() <= 1) {
        start = m;
        has_end = true;
        break;
      }
    }
    Segment seg;
    std::vector<bool> visited(g.size(), false);
    for (std::size_t cur = start;;) {
      visited[cur] = true;
      auto p = g.node(cur).point(0);
      seg.points.push_back({p[0], p[1]});
      std::size_t next = cur;
      for (auto nb : class_neighbours(cur)) {
        if (!visited[nb]) {
          next = nb;
          break;
        }
      }
      if (next == cur) break;
      cur = next;
    }
    if (seg.points.size() != members.size()) throw ContractError("segment class is not a simple pixel path");
    seg.closed = !has_end && members.size() > 2;
    seg.junction = members.size() == 1 && g.node(members.front()).props.value("junction", false);
    if (seg.points.size() > 1) {
      seg.tangents = std::array<Point2, 2>{end_tangent(seg.points, true, tangent_window),
                                           end_tangent(seg.points, false, tangent_window)};
    }
    return to_object(seg);
  };
}

// Chain the colinear segments of one class into a contour polyline.
DescriptionType contour_description(double delta, double epsilon) {
  return [delta, epsilon](const ClassView& view) {
    const NGraph& g = view.graph;
    std::vector<std::size_t> arcs;
    for (auto m : view.members) {
      if (g.node(m).point_count() > 1) arcs.push_back(m);
    }
    std::map<std::size_t, Segment> seg;
    for (auto m : arcs) seg.emplace(m, segment_from(g.node(m)));

    struct Join {
      double gap;
      std::size_t a, b;
      int end_a, end_b;
    };
    std::vector<Join> candidates;
    for (std::size_t i = 0; i < arcs.size(); ++i) {
      for (std::size_t j = i + 1; j < arcs.size(); ++j) {
        if (!g.find_edge(arcs[i], arcs[j])) continue;
        if (auto ends = best_colinear_ends(seg.at(arcs[i]), seg.at(arcs[j]), delta, epsilon)) {
          candidates.push_back({ends->gap, arcs[i], arcs[j], ends->end_a, ends->end_b});
        }
      }
    }
    std::stable_sort(candidates.begin(), candidates.end(), [](const Join& x, const Join& y) { return x.gap < y.gap; });
    // link[(segment, end)] = (other segment, other end); each end joins at most once.
    std::map<std::pair<std::size_t, int>, std::pair<std::size_t, int>> link;
    for (const auto& c : candidates) {
      if (link.contains({c.a, c.end_a}) || link.contains({c.b, c.end_b})) continue;
      link[{c.a, c.end_a}] = {c.b, c.end_b};
      link[{c.b, c.end_b}] = {c.a, c.end_a};
    }

    std::size_t first = arcs.front();
    int entry = 0;
    bool cyclic = true;
    for (auto a : arcs) {
      if (!link.contains({a, 0}) || !link.contains({a, 1})) {
        first = a;
        entry = link.contains({a, 0}) ? 1 : 0;
        cyclic = false;
        break;
      }
    }
    std::vector<std::size_t> order;
    std::vector<Point2> polyline;
    std::set<std::size_t> used;
    std::size_t cur = first;
    int in_end = entry;
    while (!used.contains(cur)) {
      used.insert(cur);
      order.push_back(cur);
      const auto& pts = seg.at(cur).points;
      if (in_end == 0) {
        polyline.insert(polyline.end(), pts.begin(), pts.end());
      } else {
        polyline.insert(polyline.end(), pts.rbegin(), pts.rend());
      }
      auto it = link.find({cur, 1 - in_end});
      if (it == link.end()) break;
      cur = it->second.first;
      in_end = it->second.second;
    }
    const bool complete = used.size() == arcs.size();
    bool closed = false;
    if (complete) {
      if (arcs.size() == 1) {
        closed = seg.at(arcs.front()).closed;
      } else {
        closed = cyclic || geom::distance(polyline.front(), polyline.back()) <= delta;
      }
    }

    SpatialObject o;
    o.kind = "contour";
    o.dim = 2;
    for (auto p : polyline) o.add_point(std::array<double, 2>{p.x, p.y});
    o.props["closed"] = closed;
    o.props["segments"] = order;
    o.props["complete"] = complete;
    return o;
  };
}

}  // namespace

Segment segment_from(const SpatialObject& object) {
  Segment s;
  s.points = geom::points_of(object);
  s.closed = object.props.value("closed", false);
  s.junction = object.props.value("junction", false);
  if (object.props.contains("tangents")) {
    const auto& t = object.props["tangents"];
    s.tangents = std::array<Point2, 2>{Point2{t[0][0].get<double>(), t[0][1].get<double>()},
                                       Point2{t[1][0].get<double>(), t[1][1].get<double>()}};
  }
  return s;
}

SpatialObject to_object(const Segment& segment) {
  SpatialObject o;
  o.kind = "segment";
  o.dim = 2;
  for (auto p : segment.points) o.add_point(std::array<double, 2>{p.x, p.y});
  o.props["closed"] = segment.closed;
  o.props["junction"] = segment.junction;
  if (segment.tangents) {
    const auto& t = *segment.tangents;
    o.props["tangents"] = {{t[0].x, t[0].y}, {t[1].x, t[1].y}};
  }
  return o;
}

bool segment_colinear(const Segment& a, const Segment& b, double delta, double epsilon_deg) {
  return best_colinear_ends(a, b, delta, epsilon_deg).has_value();
}

Layer pixel_layer(const TracerParams& params) {
  Layer layer;
  layer.name = "pixel";
  layer.combiner = combiners::four_adjacency();
  layer.dissimilarity = [](const NGraph& g, const Edge& e) {
    const auto& a = g.node(e.u).props;
    const auto& b = g.node(e.v).props;
    const bool similar = !a.value("junction", false) && !b.value("junction", false) &&
                         a["value"].get<double>() == b["value"].get<double>();
    return similar ? 0.0 : 1.0;
  };
  layer.threshold = params.threshold1;
  layer.class_rules = ClassRules("pixel-classes");
  layer.class_rules.add(
      "foreground",
      [](const ClassView& c) { return c.graph.node(c.members.front()).props["value"].get<double>() == 1.0; },
      "segment");
  layer.class_rules.add("background", [](const ClassView&) { return true; }, "background");
  layer.descriptions.add("segment", segment_description(params.tangent_window));
  layer.lift = {"segment"};
  return layer;
}

Layer segment_layer(const TracerParams& params) {
  Layer layer;
  layer.name = "segment";
  layer.combiner = combiners::near(params.separation);
  layer.dissimilarity = [delta = params.delta, epsilon = params.epsilon](const NGraph& g, const Edge& e) {
    const Segment a = segment_from(g.node(e.u));
    const Segment b = segment_from(g.node(e.v));
    return a.size() > 1 && b.size() > 1 && segment_colinear(a, b, delta, epsilon) ? 0.0 : 1.0;
  };
  layer.threshold = params.threshold2;
  layer.class_rules = ClassRules("segment-classes");
  layer.class_rules.add(
      "has-arc",
      [](const ClassView& c) {
        return std::any_of(c.members.begin(), c.members.end(),
                           [&](std::size_t m) { return c.graph.node(m).point_count() > 1; });
      },
      "contour");
  layer.class_rules.add("junction", [](const ClassView&) { return true; }, "junction");
  layer.descriptions.add("contour", contour_description(params.delta, params.epsilon));
  layer.lift = {"contour"};
  return layer;
}

TraceResult trace_boundaries(const GridField& grid, const TracerParams& params, OperatorTrace* trace) {
  params.validate();
  if (grid.channels() != 1) throw InputError("trace: bitmap must have a single channel");
  for (double v : grid.values()) {
    if (v != 0.0 && v != 1.0) throw InputError("trace: bitmap values must be 0 or 1");
  }
  TraceResult result;
  std::vector<SpatialObject> pixels = field_cells(grid);
  for (auto& p : pixels) {
    const auto r = p.props["row"].get<std::size_t>();
    const auto c = p.props["col"].get<std::size_t>();
    const bool junction = is_junction(grid, r, c);
    p.props["junction"] = junction;
    if (junction) result.junctions.push_back({static_cast<double>(r), static_cast<double>(c)});
  }

  LayerResult segments = run_layer(std::move(pixels), pixel_layer(params), trace);
  for (const auto& o : segments.objects) result.segments.push_back(segment_from(o));

  LayerResult contours = run_layer(std::move(segments.objects), segment_layer(params), trace);
  const ObjectRules rules = contour_rules();
  for (auto& o : contours.objects) {
    Contour c;
    c.segments = o.props["segments"].get<std::vector<std::size_t>>();
    c.polyline = geom::points_of(o);
    c.closed = o.props["closed"].get<bool>();
    c.legal = consistent(o, rules);
    result.contours.push_back(std::move(c));
  }
  result.segment_graph = std::move(contours.graph);
  result.contour_classes = std::move(contours.classes);
  return result;
}

nlohmann::json to_json(const TraceResult& result) {
  auto pt = [](Point2 p) { return nlohmann::json::array({p.x, p.y}); };
  nlohmann::json junctions = nlohmann::json::array();
  for (auto p : result.junctions) junctions.push_back(pt(p));
  nlohmann::json segments = nlohmann::json::array();
  for (std::size_t i = 0; i < result.segments.size(); ++i) {
    const auto& s = result.segments[i];
    nlohmann::json points = nlohmann::json::array();
    for (auto p : s.points) points.push_back(pt(p));
    nlohmann::json row = {{"id", i}, {"points", std::move(points)}, {"closed", s.closed}, {"junction", s.junction}};
    if (s.tangents) row["tangents"] = {pt((*s.tangents)[0]), pt((*s.tangents)[1])};
    segments.push_back(std::move(row));
  }
  nlohmann::json contours = nlohmann::json::array();
  for (const auto& c : result.contours) {
    nlohmann::json poly = nlohmann::json::array();
    for (auto p : c.polyline) poly.push_back(pt(p));
    contours.push_back({{"segments", c.segments}, {"closed", c.closed}, {"legal", c.legal}, {"polyline", std::move(poly)}});
  }
  nlohmann::json graph = to_json(result.segment_graph);
  graph["edges"] = nlohmann::json::array();
  for (const auto& e : result.segment_graph.edges()) graph["edges"].push_back({e.u, e.v});
  graph.erase("nodes");
  return {{"junctions", std::move(junctions)},
          {"segments", std::move(segments)},
          {"segment_graph", std::move(graph)},
          {"contour_classes", to_json(result.contour_classes)},
          {"contours", std::move(contours)}};
}

std::string summary(const TraceResult& result) {
  std::ostringstream out;
  out << "contours=" << result.contours.size() << " legal=" << result.legal_contours()
      << " segments=" << result.multi_pixel_segments() << " junctions=" << result.junctions.size();
  return out.str();
}

}  // namespace spagg::pipelines
