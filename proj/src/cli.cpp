#include "spagg/cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "spagg/errors.hpp"
#include "spagg/field.hpp"
#include "spagg/geometry.hpp"
#include "spagg/ngraph.hpp"
#include "spagg/pipelines.hpp"
#include "spagg/svg.hpp"

namespace spagg::cli {

namespace {

const std::map<std::string, std::vector<ParamSpec>>& table() {
  static const std::map<std::string, std::vector<ParamSpec>> specs = {
      {"trace",
       {{"threshold1", "0.5", "pixel classify threshold"},
        {"threshold2", "0.5", "segment classify threshold"},
        {"separation", "2.5", "segment neighborhood distance in pixels (strict)"},
        {"delta", "2.5", "colinear endpoint separation in pixels"},
        {"epsilon", "30", "colinear tangent angle in degrees"},
        {"tangent_window", "3", "endpoint pixels used for the tangent fit"}}},
      {"orbit",
       {{"k_sigma", "2", "inconsistent edge: standard deviations above the nearby mean"},
        {"depth", "2", "inconsistent edge: neighborhood depth in edges"},
        {"length_ratio", "15", "inconsistent edge: minimum multiple of the nearby median"},
        {"closure_ratio", "3", "closed iff endpoint gap <= ratio * mean edge"},
        {"path_fraction", "0.95", "path-shaped iff this share of nodes has degree <= 2"},
        {"fixed_point_ratio", "1e-09", "fixed point iff diameter <= ratio * coordinate magnitude"},
        {"min_points", "3", "fewer distinct points is a fixed point"},
        {"similarity", "0.25", "clusters similar iff smallest >= similarity * largest"}}},
      {"mst", {{"metric", "euclidean", "euclidean, manhattan or chebyshev"}}},
      {"delaunay", {}},
      {"knn", {{"k", "1", "neighbors per point (must be below the point count)"},
               {"metric", "euclidean", "euclidean, manhattan or chebyshev"}}},
      {"convolve", {{"mask", "box3", "box3, box5, gauss3, laplace3, sobel-x or sobel-y"}}},
  };
  return specs;
}

bool grid_subcommand(const std::string& s) { return s == "trace" || s == "convolve"; }

std::string extension(const std::string& path) {
  const auto dot = path.rfind('.');
  if (dot == std::string::npos || path.find('/', dot) != std::string::npos) return {};
  std::string ext = path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

std::string resolve_format(const RunConfig& config) {
  std::string format = config.format;
  if (format.empty()) {
    const std::string ext = extension(config.input);
    if (ext == "csv") format = "csv";
    else if (ext == "pgm") format = "pgm";
    else if (ext == "txt" || ext == "grid") format = "grid-text";
    else format = grid_subcommand(config.subcommand) ? "grid-text" : "csv";
  }
  if (format != "grid-text" && format != "pgm" && format != "csv") {
    throw ConfigError("unknown format '" + format + "'");
  }
  const bool grid = format != "csv";
  if (grid != grid_subcommand(config.subcommand)) {
    throw FormatError(config.subcommand + " cannot read " + format + " input");
  }
  return format;
}

// Parameter values after applying overrides to the defaults.
class Values {
 public:
  Values(const std::string& subcommand, const std::vector<std::pair<std::string, std::string>>& overrides) {
    for (const auto& spec : parameters(subcommand)) values_[spec.name] = spec.default_value;
    for (const auto& [key, value] : overrides) {
      auto it = values_.find(key);
      if (it == values_.end()) throw ConfigError("unknown parameter '" + key + "' for " + subcommand);
      it->second = value;
    }
  }

  const std::string& text(const std::string& key) const { return values_.at(key); }

  double real(const std::string& key) const {
    const std::string& s = text(key);
    double v = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size()) throw ConfigError("parameter " + key + " is not a number: " + s);
    return v;
  }

  std::size_t count(const std::string& key) const {
    const std::string& s = text(key);
    std::size_t v = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size()) throw ConfigError("parameter " + key + " is not a count: " + s);
    return v;
  }

 private:
  std::map<std::string, std::string> values_;
};

geom::Mask named_mask(const std::string& name) {
  if (name == "box3") return {3, 3, std::vector<double>(9, 1.0 / 9.0)};
  if (name == "box5") return {5, 5, std::vector<double>(25, 1.0 / 25.0)};
  if (name == "gauss3") return {3, 3, {1 / 16.0, 2 / 16.0, 1 / 16.0, 2 / 16.0, 4 / 16.0, 2 / 16.0, 1 / 16.0, 2 / 16.0, 1 / 16.0}};
  if (name == "laplace3") return {3, 3, {0, 1, 0, 1, -4, 1, 0, 1, 0}};
  if (name == "sobel-x") return {3, 3, {-1, 0, 1, -2, 0, 2, -1, 0, 1}};
  if (name == "sobel-y") return {3, 3, {-1, -2, -1, 0, 0, 0, 1, 2, 1}};
  throw ConfigError("unknown mask '" + name + "'");
}

std::string read_all(const RunConfig& config, std::istream& in) {
  std::ostringstream buf;
  if (config.input == "-") {
    buf << in.rdbuf();
  } else {
    std::ifstream file(config.input, std::ios::binary);
    if (!file) throw InputError("cannot read " + config.input);
    buf << file.rdbuf();
  }
  return buf.str();
}

std::string graph_summary(const NGraph& g) {
  std::ostringstream out;
  out << "nodes=" << g.size() << " edges=" << g.edge_count();
  if (std::all_of(g.edges().begin(), g.edges().end(), [](const Edge& e) { return e.weight.has_value(); })) {
    out << " weight=" << g.total_weight();
  }
  return out.str();
}

std::string grid_json(const GridField& field) {
  nlohmann::json values = nlohmann::json::array();
  for (std::size_t r = 0; r < field.height(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t c = 0; c < field.width(); ++c) row.push_back(field.at(r, c));
    values.push_back(std::move(row));
  }
  return nlohmann::json{{"field", {{"width", field.width()}, {"height", field.height()}, {"values", values}}}}.dump();
}

std::string execute(const RunConfig& config, std::istream& in) {
  if (config.emit != "json" && config.emit != "svg" && config.emit != "summary") {
    throw ConfigError("unknown emit mode '" + config.emit + "'");
  }
  const Values values(config.subcommand, config.params);
  const std::string format = resolve_format(config);
  const std::string text = read_all(config, in);
  const std::string& emit = config.emit;

  if (grid_subcommand(config.subcommand)) {
    const GridField grid = format == "pgm" ? load_pgm(text) : load_grid_text(text);
    if (config.subcommand == "trace") {
      pipelines::TracerParams p;
      p.threshold1 = values.real("threshold1");
      p.threshold2 = values.real("threshold2");
      p.separation = values.real("separation");
      p.delta = values.real("delta");
      p.epsilon = values.real("epsilon");
      p.tangent_window = values.count("tangent_window");
      const auto result = pipelines::trace_boundaries(grid, p);
      if (emit == "summary") return pipelines::summary(result) + "\n";
      if (emit == "svg") return svg::render(svg::scene_of(result));
      return pipelines::to_json(result).dump() + "\n";
    }
    const GridField out = geom::convolve(grid, named_mask(values.text("mask")));
    if (emit == "summary") {
      const auto v = out.values();
      const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
      std::ostringstream s;
      s << "width=" << out.width() << " height=" << out.height() << " min=" << *lo << " max=" << *hi << "\n";
      return s.str();
    }
    if (emit == "svg") return svg::render(svg::scene_of(out));
    return grid_json(out) + "\n";
  }

  const PointSet points = load_points_csv(text);
  if (config.subcommand == "orbit") {
    pipelines::OrbitParams p;
    p.k_sigma = values.real("k_sigma");
    p.depth = values.count("depth");
    p.length_ratio = values.real("length_ratio");
    p.closure_ratio = values.real("closure_ratio");
    p.path_fraction = values.real("path_fraction");
    p.fixed_point_ratio = values.real("fixed_point_ratio");
    p.min_points = values.count("min_points");
    p.similarity = values.real("similarity");
    const auto report = pipelines::classify_orbit(points, p);
    if (emit == "summary") return pipelines::summary(report) + "\n";
    if (emit == "svg") return svg::render(svg::scene_of(points));
    return pipelines::to_json(report).dump() + "\n";
  }

  NGraph graph;
  if (config.subcommand == "mst") {
    graph = construct_mst(points, MetricRegistry().get(values.text("metric")));
  } else if (config.subcommand == "delaunay") {
    graph = construct_delaunay(points);
  } else {
    graph = construct_knn(points, values.count("k"), MetricRegistry().get(values.text("metric")));
  }
  if (emit == "summary") return graph_summary(graph) + "\n";
  if (emit == "svg") return svg::render(svg::scene_of(graph));
  return to_json(graph).dump() + "\n";
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"trace", "orbit", "mst", "delaunay", "knn", "convolve"};
  return names;
}

const std::vector<ParamSpec>& parameters(const std::string& subcommand) {
  auto it = table().find(subcommand);
  if (it == table().end()) throw ConfigError("unknown subcommand '" + subcommand + "'");
  return it->second;
}

std::string describe_parameters(const std::string& subcommand) {
  const auto& specs = parameters(subcommand);
  if (specs.empty()) return "Parameters: none\n";
  std::ostringstream out;
  out << "Parameters (--param key=value):\n";
  std::size_t width = 0;
  for (const auto& s : specs) width = std::max(width, s.name.size() + 3 + s.default_value.size());
  for (const auto& s : specs) {
    const std::string lhs = s.name + " = " + s.default_value;
    out << "  " << lhs << std::string(width - lhs.size() + 4, ' ') << s.help << "\n";
  }
  return out.str();
}

std::pair<std::string, std::string> split_param(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("expected key=value, got '" + text + "'");
  return {text.substr(0, eq), text.substr(eq + 1)};
}

int run(const RunConfig& config, std::istream& in, std::ostream& out, std::ostream& err) {
  try {
    const std::string artifact = execute(config, in);
    if (config.output == "-") {
      out << artifact;
    } else {
      std::ofstream file(config.output, std::ios::binary);
      if (!file) throw ArgumentError("cannot write " + config.output);
      file << artifact;
    }
    return kOk;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const ArgumentError& e) {
    err << "parameter error: " << e.what() << "\n";
    return kParameterError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
}

}  // namespace spagg::cli
