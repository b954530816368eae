#include "spagg/field.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iterator>
#include <sstream>

#include "spagg/errors.hpp"
#include "spagg/kernels/kernels.hpp"

namespace spagg {

namespace {

double parse_number(std::string_view token, std::size_t line) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw ParseError("line " + std::to_string(line) + ": not a finite number: '" + std::string(token) + "'");
  }
  return value;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string slurp(std::istream& in) {
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

kernels::DistanceKind kernel_kind(MetricKind kind) {
  switch (kind) {
    case MetricKind::manhattan:
      return kernels::DistanceKind::manhattan;
    case MetricKind::chebyshev:
      return kernels::DistanceKind::chebyshev;
    default:
      return kernels::DistanceKind::euclidean;
  }
}

}  // namespace

GridField::GridField(std::size_t width, std::size_t height, std::size_t channels, std::vector<double> values,
                     std::vector<double> spacing)
    : width_(width), height_(height), channels_(channels), values_(std::move(values)), spacing_(std::move(spacing)) {
  if (width_ == 0 || height_ == 0 || channels_ == 0) throw ArgumentError("grid dimensions must be positive");
  if (values_.size() != width_ * height_ * channels_) {
    throw ArgumentError("grid value count does not match width*height*channels");
  }
  if (!std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); })) {
    throw ArgumentError("grid values must be finite");
  }
  if (spacing_.size() != 2 || !std::all_of(spacing_.begin(), spacing_.end(), [](double s) { return s > 0.0; })) {
    throw ArgumentError("grid spacing must be two positive reals");
  }
}

PointSet::PointSet(std::size_t dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
  if (dim_ != 2 && dim_ != 3) throw ArgumentError("point dimension must be 2 or 3");
  if (coords_.size() % dim_ != 0) throw ArgumentError("coordinate count is not a multiple of dim");
  if (!std::all_of(coords_.begin(), coords_.end(), [](double v) { return std::isfinite(v); })) {
    throw ArgumentError("point coordinates must be finite");
  }
}

void PointSet::set_values(std::vector<std::vector<double>> values) {
  if (!values.empty() && values.size() != size()) throw ArgumentError("one value vector per point required");
  values_ = std::move(values);
}

std::vector<SpatialObject> PointSet::objects() const {
  std::vector<SpatialObject> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) {
    auto p = point(i);
    SpatialObject o = make_point_object("point", {p.begin(), p.end()});
    if (!values_.empty()) o.props["values"] = values_[i];
    out.push_back(std::move(o));
  }
  return out;
}

double Metric::operator()(std::span<const double> a, std::span<const double> b) const {
  if (kind_ == MetricKind::user) return fn_(a, b);
  return kernels::distance(kernel_kind(kind_), a, b);
}

void Metric::distances_from(std::span<const double> query, const PointSet& points, std::span<double> out) const {
  if (kind_ == MetricKind::user) {
    for (std::size_t i = 0; i < points.size(); ++i) out[i] = fn_(query, points.point(i));
    return;
  }
  kernels::distances(kernel_kind(kind_), query, points.coords(), points.dim(), out.first(points.size()));
}

MetricRegistry::MetricRegistry() {
  add(Metric::euclidean());
  add(Metric::manhattan());
  add(Metric::chebyshev());
}

void MetricRegistry::add(Metric metric) {
  auto name = metric.name();
  metrics_.insert_or_assign(std::move(name), std::move(metric));
}

const Metric& MetricRegistry::get(std::string_view name) const {
  auto it = metrics_.find(name);
  if (it == metrics_.end()) throw ConfigError("unknown metric: " + std::string(name));
  return it->second;
}

std::vector<std::string> MetricRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, metric] : metrics_) out.push_back(name);
  return out;
}

GridField load_grid_text(std::string_view text) {
  std::vector<double> values;
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (height == 0) {
      width = tokens.size();
    } else if (tokens.size() != width) {
      throw FormatError("line " + std::to_string(line_no) + ": expected " + std::to_string(width) + " values, got " +
                        std::to_string(tokens.size()));
    }
    for (auto t : tokens) values.push_back(parse_number(t, line_no));
    ++height;
  }
  if (height == 0) throw EmptyFieldError("grid text is empty");
  return GridField(width, height, 1, std::move(values));
}

GridField load_grid_text(std::istream& in) { return load_grid_text(slurp(in)); }

std::string emit_grid_text(const GridField& field) {
  std::string out;
  char buf[64];
  for (std::size_t r = 0; r < field.height(); ++r) {
    for (std::size_t c = 0; c < field.width(); ++c) {
      if (c > 0) out += ' ';
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, field.at(r, c));
      out.append(buf, ptr);
    }
    out += '\n';
  }
  return out;
}

GridField load_pgm(std::string_view text) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    for (auto t : split_ws(line)) tokens.push_back(t);
  }
  if (tokens.empty()) throw EmptyFieldError("PGM input is empty");
  if (tokens[0] != "P2") throw FormatError("not a plain PGM (P2) file");
  if (tokens.size() < 4) throw FormatError("PGM header truncated");
  auto header = [&](std::size_t i) {
    double v = parse_number(tokens[i], 0);
    if (v < 1 || v != std::floor(v)) throw FormatError("PGM header values must be positive integers");
    return static_cast<std::size_t>(v);
  };
  const std::size_t width = header(1);
  const std::size_t height = header(2);
  const double maxval = static_cast<double>(header(3));
  if (tokens.size() - 4 != width * height) {
    throw FormatError("PGM sample count " + std::to_string(tokens.size() - 4) + " does not match " +
                      std::to_string(width) + "x" + std::to_string(height));
  }
  std::vector<double> values;
  values.reserve(width * height);
  for (std::size_t i = 4; i < tokens.size(); ++i) {
    double v = parse_number(tokens[i], 0);
    if (v < 0 || v > maxval || v != std::floor(v)) throw FormatError("PGM sample out of range");
    values.push_back(v / maxval);
  }
  return GridField(width, height, 1, std::move(values));
}

GridField load_pgm(std::istream& in) { return load_pgm(slurp(in)); }

PointSet load_points_csv(std::string_view text) {
  std::vector<double> coords;
  std::size_t dim = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    std::size_t arity = 0;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      std::string_view token = trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
      coords.push_back(parse_number(token, line_no));
      ++arity;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (dim == 0) {
      if (arity != 2 && arity != 3) throw FormatError("points must have 2 or 3 coordinates");
      dim = arity;
    } else if (arity != dim) {
      throw FormatError("line " + std::to_string(line_no) + ": expected " + std::to_string(dim) + " coordinates");
    }
  }
  if (dim == 0) throw EmptyFieldError("point file is empty");
  return PointSet(dim, std::move(coords));
}

PointSet load_points_csv(std::istream& in) { return load_points_csv(slurp(in)); }

std::vector<SpatialObject> field_cells(const GridField& field) {
  std::vector<SpatialObject> cells;
  cells.reserve(field.cell_count());
  for (std::size_t r = 0; r < field.height(); ++r) {
    for (std::size_t c = 0; c < field.width(); ++c) {
      SpatialObject o = make_point_object("pixel", {static_cast<double>(r), static_cast<double>(c)});
      o.props["row"] = r;
      o.props["col"] = c;
      o.props["value"] = field.at(r, c);
      if (field.channels() > 1) {
        std::vector<double> v(field.channels());
        for (std::size_t k = 0; k < field.channels(); ++k) v[k] = field.at(r, c, k);
        o.props["values"] = v;
      }
      cells.push_back(std::move(o));
    }
  }
  return cells;
}

}  // namespace spagg
