#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "spagg/cli.hpp"
#include "spagg/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Spatial aggregation: neighborhood graphs, boundary tracing and orbit typing"};
  app.require_subcommand(1);

  spagg::cli::RunConfig config;
  std::vector<std::string> raw_params;
  const std::map<std::string, std::string> about = {
      {"trace", "trace boundary contours in a binary grid"},
      {"orbit", "classify the shape of a 2D point orbit"},
      {"mst", "minimum spanning tree of a point set"},
      {"delaunay", "Delaunay triangulation edges of a 2D point set"},
      {"knn", "k-nearest-neighbor graph of a point set"},
      {"convolve", "correlate a grid with a named mask, clamped borders"},
  };
  for (const auto& name : spagg::cli::subcommands()) {
    auto* sub = app.add_subcommand(name, about.at(name));
    sub->add_option("input", config.input, "input file, - for stdin")->capture_default_str();
    sub->add_option("-f,--format", config.format, "grid-text, pgm or csv (default: from extension)");
    sub->add_option("-o,--output", config.output, "output file, - for stdout")->capture_default_str();
    sub->add_option("-e,--emit", config.emit, "json, svg or summary")->capture_default_str();
    sub->add_option("-p,--param", raw_params, "parameter override key=value (repeatable)");
    sub->footer(spagg::cli::describe_parameters(name));
    sub->callback([&config, name] { config.subcommand = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : spagg::cli::kParameterError;
  }
  try {
    for (const auto& p : raw_params) config.params.push_back(spagg::cli::split_param(p));
  } catch (const spagg::Error& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return spagg::cli::kParameterError;
  }
  return spagg::cli::run(config, std::cin, std::cout, std::cerr);
}
