#include "spagg/svg.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <limits>
#include <sstream>

namespace spagg::svg {

using geom::Point2;

namespace {

std::string num(double v) {
  if (v == 0.0) v = 0.0;  // drop negative zero
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

// Pixel geometry is (row, col); drawings put col on x.
Point2 from_cell(Point2 rc) { return {rc.y, rc.x}; }

struct Box {
  double x0 = std::numeric_limits<double>::infinity();
  double y0 = std::numeric_limits<double>::infinity();
  double x1 = -std::numeric_limits<double>::infinity();
  double y1 = -std::numeric_limits<double>::infinity();

  void add(Point2 p) {
    x0 = std::min(x0, p.x);
    y0 = std::min(y0, p.y);
    x1 = std::max(x1, p.x);
    y1 = std::max(y1, p.y);
  }
  bool empty() const { return x0 > x1; }
};

}  // namespace

std::string render(const Scene& scene) {
  Box box;
  for (const auto& c : scene.cells) {
    box.add(c.corner);
    box.add(c.corner + Point2{1, 1});
  }
  for (const auto& p : scene.paths) {
    for (auto q : p.points) box.add(q);
  }
  for (const auto& l : scene.lines) {
    box.add(l.a);
    box.add(l.b);
  }
  for (const auto& d : scene.dots) box.add(d.at);

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\"";
  if (box.empty()) {
    out << " viewBox=\"0 0 1 1\">\n</svg>\n";
    return out.str();
  }
  double w = box.x1 - box.x0;
  double h = box.y1 - box.y0;
  const double extent = std::max({w, h, 1.0});
  const double mx = 0.05 * (w > 0 ? w : extent);
  const double my = 0.05 * (h > 0 ? h : extent);
  w += 2 * mx;
  h += 2 * my;
  const double stroke = 0.01 * std::max(w, h);
  out << " viewBox=\"" << num(box.x0 - mx) << ' ' << num(box.y0 - my) << ' ' << num(w) << ' ' << num(h) << "\">\n";
  for (const auto& c : scene.cells) {
    const int level = static_cast<int>(std::clamp(c.gray, 0.0, 1.0) * 255.0 + 0.5);
    out << "<rect class=\"cell\" x=\"" << num(c.corner.x) << "\" y=\"" << num(c.corner.y)
        << "\" width=\"1\" height=\"1\" fill=\"rgb(" << level << ',' << level << ',' << level << ")\"/>\n";
  }
  for (const auto& p : scene.paths) {
    out << "<path class=\"" << p.css_class << "\" fill=\"none\" stroke=\"black\" stroke-width=\"" << num(stroke)
        << "\" d=\"";
    for (std::size_t i = 0; i < p.points.size(); ++i) {
      out << (i == 0 ? "M" : " L") << num(p.points[i].x) << ' ' << num(p.points[i].y);
    }
    if (p.closed) out << " Z";
    out << "\"/>\n";
  }
  for (const auto& l : scene.lines) {
    out << "<line class=\"" << l.css_class << "\" x1=\"" << num(l.a.x) << "\" y1=\"" << num(l.a.y) << "\" x2=\""
        << num(l.b.x) << "\" y2=\"" << num(l.b.y) << "\" stroke=\"gray\" stroke-width=\"" << num(stroke) << "\"/>\n";
  }
  for (const auto& d : scene.dots) {
    out << "<circle class=\"" << d.css_class << "\" cx=\"" << num(d.at.x) << "\" cy=\"" << num(d.at.y) << "\" r=\""
        << num(2 * stroke) << "\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

Scene scene_of(const pipelines::TraceResult& result) {
  Scene scene;
  for (std::size_t i = 0; i < result.contours.size(); ++i) {
    const auto& c = result.contours[i];
    PathItem item;
    for (auto p : c.polyline) item.points.push_back(from_cell(p));
    item.closed = c.closed;
    item.css_class = std::string("contour contour-") + std::to_string(i) + (c.legal ? " legal" : " illegal");
    scene.paths.push_back(std::move(item));
  }
  for (auto j : result.junctions) scene.dots.push_back({from_cell(j), "junction"});
  return scene;
}

Scene scene_of(const NGraph& graph) {
  Scene scene;
  auto at = [&](std::size_t i) {
    auto p = graph.node(i).point(0);
    return Point2{p[0], p.size() > 1 ? p[1] : 0.0};
  };
  for (const auto& e : graph.edges()) scene.lines.push_back({at(e.u), at(e.v), "edge"});
  for (std::size_t i = 0; i < graph.size(); ++i) {
    if (graph.node(i).point_count() > 0) scene.dots.push_back({at(i), "node"});
  }
  return scene;
}

Scene scene_of(const PointSet& points) {
  Scene scene;
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto p = points.point(i);
    scene.dots.push_back({{p[0], p[1]}, "point"});
  }
  return scene;
}

Scene scene_of(const GridField& field) {
  Scene scene;
  if (field.cell_count() == 0) return scene;
  const auto values = field.values();
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double range = *hi - *lo;
  for (std::size_t r = 0; r < field.height(); ++r) {
    for (std::size_t c = 0; c < field.width(); ++c) {
      const double v = field.at(r, c);
      scene.cells.push_back({{static_cast<double>(c), static_cast<double>(r)}, range > 0 ? (v - *lo) / range : 0.5});
    }
  }
  return scene;
}

}  // namespace spagg::svg
