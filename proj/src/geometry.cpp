#include "spagg/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>

#include "spagg/errors.hpp"
#include "spagg/kernels/kernels.hpp"

namespace spagg::geom {

double norm(Point2 a) { return std::hypot(a.x, a.y); }
double distance(Point2 a, Point2 b) { return norm(a - b); }

Polyline::Polyline(std::vector<Point2> points, bool closed) : points_(std::move(points)), closed_(closed) {
  if (points_.size() < (closed_ ? 3u : 2u)) throw ArgumentError("polyline has too few points");
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (points_[i] == points_[i - 1]) throw ArgumentError("polyline has repeated consecutive points");
  }
  if (closed_ && points_.front() == points_.back()) throw ArgumentError("closed polyline repeats its first point");
}

std::vector<Segment2> Polyline::segments() const {
  std::vector<Segment2> out;
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) out.push_back({points_[i], points_[i + 1]});
  if (closed_) out.push_back({points_.back(), points_.front()});
  return out;
}

namespace {

Polyline ring(const Polygon& p) { return Polyline(p.vertices, true); }

std::vector<Segment2> edges_of(const Polygon& p) {
  std::vector<Segment2> out;
  const std::size_t n = p.vertices.size();
  for (std::size_t i = 0; i < n; ++i) out.push_back({p.vertices[i], p.vertices[(i + 1) % n]});
  return out;
}

Polygon cell_square(const Cell& c) {
  const double r = static_cast<double>(c.first);
  const double k = static_cast<double>(c.second);
  return Polygon{{{r - 0.5, k - 0.5}, {r + 0.5, k - 0.5}, {r + 0.5, k + 0.5}, {r - 0.5, k + 0.5}}};
}

// Unit edges separating region cells from non-region cells.
std::vector<Segment2> pixel_boundary_edges(const PixelSet& cells) {
  std::vector<Segment2> out;
  for (const auto& c : cells) {
    const double r = static_cast<double>(c.first);
    const double k = static_cast<double>(c.second);
    if (!cells.contains({c.first - 1, c.second})) out.push_back({{r - 0.5, k - 0.5}, {r - 0.5, k + 0.5}});
    if (!cells.contains({c.first + 1, c.second})) out.push_back({{r + 0.5, k - 0.5}, {r + 0.5, k + 0.5}});
    if (!cells.contains({c.first, c.second - 1})) out.push_back({{r - 0.5, k - 0.5}, {r + 0.5, k - 0.5}});
    if (!cells.contains({c.first, c.second + 1})) out.push_back({{r - 0.5, k + 0.5}, {r + 0.5, k + 0.5}});
  }
  return out;
}

bool point_on_segment(Point2 p, const Segment2& s) {
  const Point2 d = s.b - s.a;
  const double len = norm(d);
  if (len == 0.0) return distance(p, s.a) <= kEps;
  if (std::fabs(cross(d, p - s.a)) / len > kEps) return false;
  const double t = dot(p - s.a, d) / (len * len);
  return t >= -kEps / len && t <= 1.0 + kEps / len;
}

// Candidate indices of the closed unit cells containing coordinate v.
std::vector<long> cells_covering(double v) {
  const long nearest = std::lround(v);
  const double frac = v - static_cast<double>(nearest);
  std::vector<long> out{nearest};
  if (std::fabs(frac - 0.5) <= kEps) out.push_back(nearest + 1);
  if (std::fabs(frac + 0.5) <= kEps) out.push_back(nearest - 1);
  return out;
}

bool segments_touch(const std::vector<Segment2>& a, const std::vector<Segment2>& b) {
  for (const auto& s : a) {
    for (const auto& t : b) {
      if (!intersect(s, t).empty()) return true;
    }
  }
  return false;
}

Polygon ccw(Polygon p) {
  if (signed_area(p) < 0) std::reverse(p.vertices.begin(), p.vertices.end());
  return p;
}

void append_unique(std::vector<Point2>& pts, Point2 p) {
  for (const auto& q : pts) {
    if (distance(p, q) <= kEps) return;
  }
  pts.push_back(p);
}

bool polygon_in_polygon(const Polygon& outer, const Polygon& inner) {
  for (const auto& v : inner.vertices) {
    if (!contain(Region{outer}, v)) return false;
  }
  return !segments_touch(edges_of(outer), edges_of(inner));
}

}  // namespace

double length(const Polyline& line) {
  double sum = 0.0;
  for (const auto& s : line.segments()) sum += distance(s.a, s.b);
  return sum;
}

double signed_area(const Polygon& polygon) {
  const auto& v = polygon.vertices;
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) sum += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * sum;
}

double area(const Polygon& polygon) { return std::fabs(signed_area(polygon)); }

bool self_intersecting(const Polyline& line) {
  const auto segs = line.segments();
  const std::size_t m = segs.size();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const auto hit = intersect(segs[i], segs[j]);
      if (hit.empty()) continue;
      const bool adjacent = j == i + 1 || (line.closed() && i == 0 && j == m - 1);
      // Neighbouring edges legitimately share one vertex; anything more is a crossing.
      if (adjacent && hit.segments.empty() && hit.points.size() == 1) continue;
      return true;
    }
  }
  return false;
}

bool is_simple(const Polygon& polygon) {
  if (polygon.vertices.size() < 3) return false;
  try {
    return !self_intersecting(ring(polygon));
  } catch (const ArgumentError&) {
    return false;
  }
}

bool is_convex(const Polygon& polygon) {
  const auto& v = polygon.vertices;
  const std::size_t n = v.size();
  if (n < 3) return false;
  int sign = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = cross(v[(i + 1) % n] - v[i], v[(i + 2) % n] - v[(i + 1) % n]);
    if (std::fabs(c) <= kEps) continue;
    const int s = c > 0 ? 1 : -1;
    if (sign != 0 && s != sign) return false;
    sign = s;
  }
  return sign != 0;
}

Properties intrinsic_geometry(const Polyline& line, const std::set<std::string>& properties) {
  Properties out = Properties::object();
  for (const auto& name : properties) {
    if (name == "length") {
      out["length"] = length(line);
    } else if (name == "curvature") {
      const auto& p = line.points();
      const std::size_t n = p.size();
      std::vector<double> k(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        if (!line.closed() && (i == 0 || i + 1 == n)) continue;
        const Point2 prev = p[(i + n - 1) % n];
        const Point2 next = p[(i + 1) % n];
        const double a = distance(prev, p[i]);
        const double b = distance(p[i], next);
        const double c = distance(prev, next);
        k[i] = c == 0.0 ? 2.0 / a : 2.0 * std::fabs(cross(p[i] - prev, next - prev)) / (a * b * c);
      }
      out["curvature"] = k;
    } else {
      throw ArgumentError("property '" + name + "' is not defined for polylines");
    }
  }
  return out;
}

Properties intrinsic_geometry(const Region& region, const std::set<std::string>& properties) {
  Properties out = Properties::object();
  for (const auto& name : properties) {
    if (name != "area" && name != "perimeter" && name != "centroid") {
      throw ArgumentError("property '" + name + "' is not defined for regions");
    }
  }
  if (const auto* cells = std::get_if<PixelSet>(&region)) {
    if (properties.contains("area")) out["area"] = static_cast<double>(cells->size());
    if (properties.contains("perimeter")) out["perimeter"] = static_cast<double>(pixel_boundary_edges(*cells).size());
    if (properties.contains("centroid")) {
      double r = 0.0, c = 0.0;
      for (const auto& cell : *cells) {
        r += static_cast<double>(cell.first);
        c += static_cast<double>(cell.second);
      }
      const double n = cells->empty() ? 1.0 : static_cast<double>(cells->size());
      out["centroid"] = std::vector<double>{r / n, c / n};
    }
    return out;
  }
  const auto& poly = std::get<Polygon>(region);
  if (properties.contains("area")) out["area"] = area(poly);
  if (properties.contains("perimeter")) out["perimeter"] = length(ring(poly));
  if (properties.contains("centroid")) {
    const double a = signed_area(poly);
    const auto& v = poly.vertices;
    double cx = 0.0, cy = 0.0;
    if (a != 0.0) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        const Point2 p = v[i];
        const Point2 q = v[(i + 1) % v.size()];
        const double f = cross(p, q);
        cx += (p.x + q.x) * f;
        cy += (p.y + q.y) * f;
      }
      cx /= 6.0 * a;
      cy /= 6.0 * a;
    } else {
      for (const auto& p : v) {
        cx += p.x / static_cast<double>(v.size());
        cy += p.y / static_cast<double>(v.size());
      }
    }
    out["centroid"] = std::vector<double>{cx, cy};
  }
  return out;
}

bool on_boundary(const Polygon& polygon, Point2 p) {
  for (const auto& e : edges_of(polygon)) {
    if (point_on_segment(p, e)) return true;
  }
  return false;
}

bool contain(const Region& outer, Point2 p) {
  if (const auto* cells = std::get_if<PixelSet>(&outer)) {
    for (long r : cells_covering(p.x)) {
      for (long c : cells_covering(p.y)) {
        if (!cells->contains({r, c})) return false;
      }
    }
    return true;
  }
  const auto& poly = std::get<Polygon>(outer);
  if (poly.vertices.size() < 3 || on_boundary(poly, p)) return false;
  bool inside = false;
  const auto& v = poly.vertices;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    if ((v[i].y > p.y) != (v[j].y > p.y)) {
      const double x_cross = v[j].x + (p.y - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

bool contain(const Region& outer, const Region& inner) {
  const auto* outer_cells = std::get_if<PixelSet>(&outer);
  const auto* inner_cells = std::get_if<PixelSet>(&inner);
  if (outer_cells && inner_cells) {
    if (inner_cells->empty()) return true;
    for (const auto& c : *inner_cells) {
      for (long dr = -1; dr <= 1; ++dr) {
        for (long dc = -1; dc <= 1; ++dc) {
          if (!outer_cells->contains({c.first + dr, c.second + dc})) return false;
        }
      }
    }
    return true;
  }
  if (!outer_cells && !inner_cells) return polygon_in_polygon(std::get<Polygon>(outer), std::get<Polygon>(inner));
  if (inner_cells) {
    const auto& poly = std::get<Polygon>(outer);
    return std::all_of(inner_cells->begin(), inner_cells->end(),
                       [&](const Cell& c) { return polygon_in_polygon(poly, cell_square(c)); });
  }
  const auto& poly = std::get<Polygon>(inner);
  for (const auto& v : poly.vertices) {
    if (!contain(outer, v)) return false;
  }
  return !segments_touch(pixel_boundary_edges(*outer_cells), edges_of(poly));
}

Intersection intersect(const Segment2& s1, const Segment2& s2) {
  Intersection out;
  const Point2 d1 = s1.b - s1.a;
  const Point2 d2 = s2.b - s2.a;
  const double l1 = norm(d1);
  const double l2 = norm(d2);
  if (l1 == 0.0 || l2 == 0.0) {
    const Point2 p = l1 == 0.0 ? s1.a : s2.a;
    const Segment2& other = l1 == 0.0 ? s2 : s1;
    if (point_on_segment(p, other)) out.points.push_back(p);
    return out;
  }
  const double denom = cross(d1, d2);
  const Point2 w = s2.a - s1.a;
  if (std::fabs(denom) > kEps * l1 * l2) {
    const double t = cross(w, d2) / denom;
    const double u = cross(w, d1) / denom;
    const double tt = kEps / l1;
    const double tu = kEps / l2;
    if (t >= -tt && t <= 1.0 + tt && u >= -tu && u <= 1.0 + tu) {
      out.points.push_back(s1.a + std::clamp(t, 0.0, 1.0) * d1);
    }
    return out;
  }
  if (std::fabs(cross(d1, w)) / l1 > kEps) return out;
  // Collinear: overlap of the parameter intervals along s1.
  const double t0 = dot(s2.a - s1.a, d1) / (l1 * l1);
  const double t1 = dot(s2.b - s1.a, d1) / (l1 * l1);
  const double lo = std::max(0.0, std::min(t0, t1));
  const double hi = std::min(1.0, std::max(t0, t1));
  if ((hi - lo) * l1 < -kEps) return out;
  if ((hi - lo) * l1 <= kEps) {
    out.points.push_back(s1.a + std::clamp(0.5 * (lo + hi), 0.0, 1.0) * d1);
    return out;
  }
  Segment2 overlap{s1.a + lo * d1, s1.a + hi * d1};
  if (overlap.b < overlap.a) std::swap(overlap.a, overlap.b);
  out.segments.push_back(overlap);
  return out;
}

Intersection intersect(const Polyline& a, const Polyline& b) {
  Intersection out;
  for (const auto& s : a.segments()) {
    for (const auto& t : b.segments()) {
      auto hit = intersect(s, t);
      for (auto p : hit.points) append_unique(out.points, p);
      for (auto seg : hit.segments) out.segments.push_back(seg);
    }
  }
  std::sort(out.points.begin(), out.points.end());
  std::sort(out.segments.begin(), out.segments.end(),
            [](const Segment2& x, const Segment2& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
  return out;
}

Polygon clip_convex(const Polygon& subject, const Polygon& convex_clip) {
  const Polygon clip = ccw(convex_clip);
  std::vector<Point2> output = subject.vertices;
  const std::size_t m = clip.vertices.size();
  for (std::size_t e = 0; e < m && !output.empty(); ++e) {
    const Point2 a = clip.vertices[e];
    const Point2 b = clip.vertices[(e + 1) % m];
    auto side = [&](Point2 p) { return cross(b - a, p - a); };
    std::vector<Point2> input = std::move(output);
    output.clear();
    for (std::size_t i = 0; i < input.size(); ++i) {
      const Point2 cur = input[i];
      const Point2 prev = input[(i + input.size() - 1) % input.size()];
      const double sc = side(cur);
      const double sp = side(prev);
      if (sc >= 0) {
        if (sp < 0) output.push_back(prev + (sp / (sp - sc)) * (cur - prev));
        output.push_back(cur);
      } else if (sp >= 0) {
        output.push_back(prev + (sp / (sp - sc)) * (cur - prev));
      }
    }
  }
  return Polygon{std::move(output)};
}

std::vector<Polygon> triangulate(const Polygon& polygon) {
  const Polygon poly = ccw(polygon);
  std::vector<Point2> v = poly.vertices;
  std::vector<Polygon> out;
  auto inside_triangle = [](Point2 p, Point2 a, Point2 b, Point2 c) {
    return cross(b - a, p - a) >= 0 && cross(c - b, p - b) >= 0 && cross(a - c, p - c) >= 0;
  };
  while (v.size() > 3) {
    const std::size_t n = v.size();
    bool clipped = false;
    for (std::size_t i = 0; i < n; ++i) {
      const Point2 a = v[(i + n - 1) % n];
      const Point2 b = v[i];
      const Point2 c = v[(i + 1) % n];
      const double turn = cross(b - a, c - b);
      if (turn < 0) continue;
      if (turn == 0) {
        v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
        clipped = true;
        break;
      }
      bool ear = true;
      for (std::size_t j = 0; j < n && ear; ++j) {
        if (j == i || j == (i + 1) % n || j == (i + n - 1) % n) continue;
        if (v[j] == a || v[j] == b || v[j] == c) continue;
        if (inside_triangle(v[j], a, b, c)) ear = false;
      }
      if (!ear) continue;
      out.push_back(Polygon{{a, b, c}});
      v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
      clipped = true;
      break;
    }
    if (!clipped) throw ContractError("triangulate: polygon is not simple");
  }
  if (v.size() == 3 && cross(v[1] - v[0], v[2] - v[1]) != 0) out.push_back(Polygon{v});
  return out;
}

double Intersection::area() const {
  double sum = static_cast<double>(pixels.size());
  for (const auto& p : pieces) sum += geom::area(p);
  return sum;
}

bool Intersection::contains(Point2 p) const {
  for (const auto& piece : pieces) {
    if (piece.vertices.size() >= 3 && (contain(Region{piece}, p) || on_boundary(piece, p))) return true;
  }
  return !pixels.empty() && contain(Region{pixels}, p);
}

namespace {

std::vector<Polygon> clip_pieces(const Polygon& subject, const Polygon& other) {
  std::vector<Polygon> out;
  for (const auto& tri : triangulate(other)) {
    Polygon piece = clip_convex(subject, tri);
    if (piece.vertices.size() >= 3 && area(piece) > kEps * kEps) out.push_back(std::move(piece));
  }
  return out;
}

}  // namespace

Intersection intersect(const Region& a, const Region& b) {
  Intersection out;
  const auto* ca = std::get_if<PixelSet>(&a);
  const auto* cb = std::get_if<PixelSet>(&b);
  if (ca && cb) {
    std::set_intersection(ca->begin(), ca->end(), cb->begin(), cb->end(),
                          std::inserter(out.pixels, out.pixels.end()));
    return out;
  }
  if (!ca && !cb) {
    out.pieces = clip_pieces(std::get<Polygon>(a), std::get<Polygon>(b));
    return out;
  }
  const PixelSet& cells = ca ? *ca : *cb;
  const Polygon& poly = ca ? std::get<Polygon>(b) : std::get<Polygon>(a);
  for (const auto& c : cells) {
    for (auto& piece : clip_pieces(poly, cell_square(c))) out.pieces.push_back(std::move(piece));
  }
  return out;
}

PixelSet boundary(const PixelSet& region) {
  PixelSet out;
  for (const auto& c : region) {
    if (!region.contains({c.first - 1, c.second}) || !region.contains({c.first + 1, c.second}) ||
        !region.contains({c.first, c.second - 1}) || !region.contains({c.first, c.second + 1})) {
      out.insert(c);
    }
  }
  return out;
}

Polyline boundary(const Polygon& region) { return ring(region); }

PixelSet coboundary(const PixelSet& closed_curve) {
  if (closed_curve.empty()) throw IllFormedError("coboundary: empty curve");
  long rmin = closed_curve.begin()->first, rmax = rmin;
  long cmin = closed_curve.begin()->second, cmax = cmin;
  for (const auto& c : closed_curve) {
    int neighbours = 0;
    for (long dr = -1; dr <= 1; ++dr) {
      for (long dc = -1; dc <= 1; ++dc) {
        if ((dr != 0 || dc != 0) && closed_curve.contains({c.first + dr, c.second + dc})) ++neighbours;
      }
    }
    if (neighbours < 2) throw IllFormedError("coboundary: pixel curve is open");
    rmin = std::min(rmin, c.first);
    rmax = std::max(rmax, c.first);
    cmin = std::min(cmin, c.second);
    cmax = std::max(cmax, c.second);
  }
  // Exterior flood fill over the bounding box grown by one cell.
  --rmin, --cmin, ++rmax, ++cmax;
  PixelSet exterior;
  std::deque<Cell> queue{{rmin, cmin}};
  exterior.insert({rmin, cmin});
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    for (auto [dr, dc] : std::array<std::pair<long, long>, 4>{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}}) {
      const Cell n{c.first + dr, c.second + dc};
      if (n.first < rmin || n.first > rmax || n.second < cmin || n.second > cmax) continue;
      if (closed_curve.contains(n) || exterior.contains(n)) continue;
      exterior.insert(n);
      queue.push_back(n);
    }
  }
  PixelSet filled;
  for (long r = rmin; r <= rmax; ++r) {
    for (long c = cmin; c <= cmax; ++c) {
      if (!exterior.contains({r, c})) filled.insert({r, c});
    }
  }
  return filled;
}

Polygon coboundary(const Polyline& closed_curve) {
  if (!closed_curve.closed()) throw IllFormedError("coboundary: polyline is open");
  if (self_intersecting(closed_curve)) throw IllFormedError("coboundary: polyline is self-intersecting");
  return Polygon{closed_curve.points()};
}

GridField convolve(const GridField& field, const Mask& mask) {
  if (field.channels() != 1) throw ArgumentError("convolve: field must have a single channel");
  if (mask.width % 2 == 0 || mask.height % 2 == 0) throw ArgumentError("convolve: mask dimensions must be odd");
  if (mask.values.size() != mask.width * mask.height) throw ArgumentError("convolve: mask value count mismatch");
  std::vector<double> out(field.cell_count());
  kernels::correlate_clamped({field.values(), field.width(), field.height()},
                             {mask.values, mask.width, mask.height}, out);
  return GridField(field.width(), field.height(), 1, std::move(out), {field.spacing().begin(), field.spacing().end()});
}

bool contiguous(const Region& a, const Region& b) {
  const auto* ca = std::get_if<PixelSet>(&a);
  const auto* cb = std::get_if<PixelSet>(&b);
  if (ca && cb) {
    const PixelSet& small = ca->size() <= cb->size() ? *ca : *cb;
    const PixelSet& large = ca->size() <= cb->size() ? *cb : *ca;
    for (const auto& c : small) {
      for (auto [dr, dc] : std::array<std::pair<long, long>, 5>{{{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}}}) {
        if (large.contains({c.first + dr, c.second + dc})) return true;
      }
    }
    return false;
  }
  auto closures_meet = [](const Polygon& p, const Polygon& q) {
    if (segments_touch(edges_of(p), edges_of(q))) return true;
    return contain(Region{p}, q.vertices.front()) || contain(Region{q}, p.vertices.front());
  };
  if (!ca && !cb) return closures_meet(std::get<Polygon>(a), std::get<Polygon>(b));
  const PixelSet& cells = ca ? *ca : *cb;
  const Polygon& poly = ca ? std::get<Polygon>(b) : std::get<Polygon>(a);
  return std::any_of(cells.begin(), cells.end(), [&](const Cell& c) { return closures_meet(poly, cell_square(c)); });
}

std::vector<Point2> points_of(const SpatialObject& object) {
  if (object.dim < 2) throw ArgumentError("object geometry is not 2D");
  std::vector<Point2> out;
  out.reserve(object.point_count());
  for (std::size_t i = 0; i < object.point_count(); ++i) {
    auto p = object.point(i);
    out.push_back({p[0], p[1]});
  }
  return out;
}

Polygon polygon_of(const SpatialObject& object) { return Polygon{points_of(object)}; }

}  // namespace spagg::geom
