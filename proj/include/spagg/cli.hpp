#pragma once

// Command-line plumbing, kept out of main() so it can be tested in-process.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace spagg::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kParameterError = 2, kInternalError = 3 };

struct RunConfig {
  std::string subcommand;  // trace, orbit, mst, delaunay, knn, convolve
  std::string input = "-";   // "-" reads stdin
  std::string format;        // grid-text, pgm, csv; empty picks from extension and subcommand
  std::string output = "-";  // "-" writes stdout
  std::string emit = "json";  // json, svg, summary
  std::vector<std::pair<std::string, std::string>> params;
};

struct ParamSpec {
  std::string name;
  std::string default_value;
  std::string help;
};

const std::vector<std::string>& subcommands();
const std::vector<ParamSpec>& parameters(const std::string& subcommand);  // throws ConfigError
std::string describe_parameters(const std::string& subcommand);

// Splits "key=value"; throws ConfigError without '='.
std::pair<std::string, std::string> split_param(const std::string& text);

int run(const RunConfig& config, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace spagg::cli
