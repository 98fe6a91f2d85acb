#pragma once

// Run configuration shared by every subcommand.

#include "qbm/analysis.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qbm::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kNotConverged = 2,
  kPropertyViolation = 3,
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Format { csv, json };

struct RunConfig {
  std::string command;
  std::optional<std::string> model;  // visible2q | hidden3q; commands pick a default
  std::optional<double> r;
  std::optional<double> phi;  // radians
  std::optional<std::vector<double>> grid_r;
  std::optional<std::vector<double>> grid_phi;  // radians
  BfgsOptions bfgs;
  MultiStartOptions ms;
  std::string out;  // empty writes to stdout
  std::string cloud_out;
  Format format = Format::csv;
  int trials = 100;
  double step = 1e-5;
  std::string mode = "r1";
  std::size_t samples = 10000;

  /// Range checks on every field; throws ConfigError.
  void validate() const;
};

QbmModel make_model(std::string_view name);

/// "lo:hi:n" (n evenly spaced points, both ends included) or a comma list.
std::vector<double> parse_grid(std::string_view spec, double unit = 1.0);

/// "uniform:lo:hi" or "constant:c".
InitSpec parse_init(std::string_view spec);

std::uint64_t parse_seed(std::string_view text);
double parse_real(std::string_view text, std::string_view what);
long long parse_integer(std::string_view text, std::string_view what);

/// Builds a configuration from a flat object whose keys are flag names
/// without the leading dashes. Values may be JSON numbers or strings.
/// Angles are in units of pi. `env_seed` is used when no seed is given.
RunConfig config_from_json(const std::string& command, const nlohmann::json& flat,
                           std::optional<std::string> env_seed);

}  // namespace qbm::cli
