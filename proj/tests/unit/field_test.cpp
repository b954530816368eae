#include <fstream>
#include <sstream>

#include "doctest.h"
#include "spagg/errors.hpp"
#include "spagg/field.hpp"

using namespace spagg;

TEST_SUITE("field") {

TEST_CASE("grid text round trip") {
  const std::string text = "0 1 0\n1 1 1\n";
  const GridField g = load_grid_text(text);
  CHECK(g.width() == 3);
  CHECK(g.height() == 2);
  CHECK(g.channels() == 1);
  CHECK(g.at(0, 1) == 1.0);
  CHECK(g.at(1, 0) == 1.0);
  CHECK(load_grid_text(emit_grid_text(g)) == g);
}

TEST_CASE("grid text accepts tabs and fractional values") {
  const GridField g = load_grid_text("0.25\t-1e3\n2\t3\n");
  CHECK(g.at(0, 0) == 0.25);
  CHECK(g.at(0, 1) == -1000.0);
  CHECK(load_grid_text(emit_grid_text(g)) == g);
}

TEST_CASE("grid text errors") {
  CHECK_THROWS_AS(load_grid_text("0 1\n1\n"), FormatError);
  CHECK_THROWS_AS(load_grid_text("0 x\n"), ParseError);
  CHECK_THROWS_AS(load_grid_text(""), EmptyFieldError);
  CHECK_THROWS_AS(load_grid_text("\n\n"), EmptyFieldError);
}

TEST_CASE("paper bitmap loads with 51 foreground pixels") {
  std::ifstream in(SPAGG_SOURCE_DIR "/data/paper_bitmap.txt");
  REQUIRE(in);
  const GridField g = load_grid_text(in);
  CHECK(g.width() == 15);
  CHECK(g.height() == 12);
  std::size_t ones = 0;
  for (double v : g.values()) ones += v == 1.0;
  CHECK(ones == 51);
}

TEST_CASE("pgm normalizes by maxval") {
  const GridField g = load_pgm("P2\n# comment\n2 2\n4\n0 4\n2 1\n");
  CHECK(g.width() == 2);
  CHECK(g.at(0, 1) == 1.0);
  CHECK(g.at(1, 0) == 0.5);
  CHECK_THROWS_AS(load_pgm("P5\n1 1\n255\n"), FormatError);
}

TEST_CASE("csv points") {
  const PointSet p = load_points_csv("0,0\n3,4\n");
  CHECK(p.dim() == 2);
  CHECK(p.size() == 2);
  CHECK(p.point(1)[1] == 4.0);
  CHECK(load_points_csv("1,2,3\n4,5,6\n").dim() == 3);
  CHECK_THROWS_AS(load_points_csv("1,2\n1,2,3\n"), FormatError);
  CHECK_THROWS_AS(load_points_csv("1,a\n"), ParseError);
}

TEST_CASE("grid invariants are checked") {
  CHECK_THROWS_AS(GridField(2, 2, 1, {1, 2, 3}), ArgumentError);
  CHECK_THROWS_AS(GridField(1, 1, 1, {1}, {0.0, 1.0}), ArgumentError);
}

TEST_CASE("metrics") {
  const std::vector<double> a{0, 0}, b{3, -4};
  CHECK(Metric::euclidean()(a, b) == 5.0);
  CHECK(Metric::manhattan()(a, b) == 7.0);
  CHECK(Metric::chebyshev()(a, b) == 4.0);
  MetricRegistry reg;
  CHECK(reg.get("manhattan")(a, b) == 7.0);
  CHECK_THROWS_AS(reg.get("cosine"), ConfigError);
  const Metric user = Metric::user("dx", [](std::span<const double> p, std::span<const double> q) {
    return std::abs(p[0] - q[0]);
  });
  CHECK(user(a, b) == 3.0);
}

TEST_CASE("field cells carry position and value") {
  const GridField g = load_grid_text("5 6\n7 8\n");
  const auto cells = field_cells(g);
  REQUIRE(cells.size() == 4);
  CHECK(cells[2].kind == "pixel");
  CHECK(cells[2].props["row"] == 1);
  CHECK(cells[2].props["col"] == 0);
  CHECK(cells[2].props["value"] == 7.0);
}

}
