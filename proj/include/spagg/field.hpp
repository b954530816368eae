#pragma once

#include <cstddef>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spagg/object.hpp"

namespace spagg {

// Dense row-major grid sampling of a field. Row 0 is the top row.
class GridField {
 public:
  GridField(std::size_t width, std::size_t height, std::size_t channels, std::vector<double> values,
            std::vector<double> spacing = {1.0, 1.0});

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t channels() const { return channels_; }
  std::size_t cell_count() const { return width_ * height_; }
  std::span<const double> values() const { return values_; }
  std::span<const double> spacing() const { return spacing_; }

  double at(std::size_t row, std::size_t col, std::size_t channel = 0) const {
    return values_[(row * width_ + col) * channels_ + channel];
  }

  bool operator==(const GridField&) const = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::size_t channels_;
  std::vector<double> values_;
  std::vector<double> spacing_;
};

// Ordered sample points of dimension 2 or 3. Order is preserved because orbit
// samples are temporally ordered.
class PointSet {
 public:
  PointSet(std::size_t dim, std::vector<double> coords);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return coords_.size() / dim_; }
  bool empty() const { return coords_.empty(); }
  std::span<const double> coords() const { return coords_; }
  std::span<const double> point(std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }

  // Optional per-point vector attachment; empty when absent.
  const std::vector<std::vector<double>>& values() const { return values_; }
  void set_values(std::vector<std::vector<double>> values);

  std::vector<SpatialObject> objects() const;

 private:
  std::size_t dim_;
  std::vector<double> coords_;
  std::vector<std::vector<double>> values_;
};

enum class MetricKind { euclidean, manhattan, chebyshev, user };

class Metric {
 public:
  using Fn = std::function<double(std::span<const double>, std::span<const double>)>;

  static Metric euclidean() { return Metric(MetricKind::euclidean, "euclidean", {}); }
  static Metric manhattan() { return Metric(MetricKind::manhattan, "manhattan", {}); }
  static Metric chebyshev() { return Metric(MetricKind::chebyshev, "chebyshev", {}); }
  static Metric user(std::string name, Fn fn) { return Metric(MetricKind::user, std::move(name), std::move(fn)); }

  MetricKind kind() const { return kind_; }
  const std::string& name() const { return name_; }

  double operator()(std::span<const double> a, std::span<const double> b) const;

  // Distances from `query` to every point of `points`, written to `out`.
  // Built-in metrics go through the dispatched SIMD kernels.
  void distances_from(std::span<const double> query, const PointSet& points, std::span<double> out) const;

 private:
  Metric(MetricKind kind, std::string name, Fn fn) : kind_(kind), name_(std::move(name)), fn_(std::move(fn)) {}

  MetricKind kind_;
  std::string name_;
  Fn fn_;
};

class MetricRegistry {
 public:
  MetricRegistry();

  void add(Metric metric);
  const Metric& get(std::string_view name) const;  // throws ConfigError
  std::vector<std::string> names() const;

 private:
  std::map<std::string, Metric, std::less<>> metrics_;
};

GridField load_grid_text(std::istream& in);
GridField load_grid_text(std::string_view text);
std::string emit_grid_text(const GridField& field);

// Netpbm plain (P2) greymap; samples are normalised to [0, 1] by maxval.
GridField load_pgm(std::istream& in);
GridField load_pgm(std::string_view text);

PointSet load_points_csv(std::istream& in);
PointSet load_points_csv(std::string_view text);

// One "pixel" object per cell, row-major, geometry (row, col), props
// {"row","col","value"} (+ "values" when channels > 1).
std::vector<SpatialObject> field_cells(const GridField& field);

}  // namespace spagg
