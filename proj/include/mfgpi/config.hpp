#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <stdexcept>
#include <string>

#include "mfgpi/solvers.hpp"

namespace mfg {

/// Bad configuration input. key() names the offending key when there is one.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key.empty() ? message : "config key '" + key + "': " + message),
        key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Run configuration as read from a file plus --set overrides.
///
/// Accepted keys (anything else is an error):
///   scenario, algorithm, beta, zeta, T, I, N, epsilon, R, tol, max_iters,
///   output_dir, linear_solver, newton_tol, newton_max_iters, blowup,
///   pi1_source
/// Scenario parameters left unset take the preset's defaults.
struct RunConfig {
  std::string scenario = "example1";
  std::string algorithm = "pi1";
  std::optional<double> beta;
  std::optional<double> zeta;
  std::optional<double> horizon;  // T
  std::optional<int> nodes;       // I
  std::optional<int> steps;       // N
  std::optional<double> epsilon;
  double bound = kUnbounded;  // R
  double tol = 1e-8;
  std::optional<int> max_iters;
  std::string output_dir = "mfgpi_out";
  std::string linear_solver = "direct";
  double newton_tol = 1e-11;
  int newton_max_iters = 50;
  double blowup = 1e8;
  std::string pi1_source = "lagrangian";
};

inline constexpr int kDefaultMaxIters = 500;

/// Sets one key from its textual value. Throws ConfigError.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Parses "key = value" lines; '#' starts a comment. Duplicate keys are errors.
RunConfig parse_config_text(const std::string& text);

/// Reads either the key-value format or a JSON run manifest (its "config"
/// object). Throws ConfigError on unreadable or malformed input.
RunConfig load_config_file(const std::string& path);

/// Applies "key=value" strings in order.
void apply_overrides(RunConfig& config, const std::vector<std::string>& assignments);

/// Checks every value and builds the solver configuration. Throws ConfigError
/// naming the first bad key.
SolverConfig to_solver_config(const RunConfig& config);

/// Fully resolved echo of the configuration (scenario defaults filled in).
/// Feeding it back through apply_setting reproduces the same solve.
nlohmann::json resolved_config_json(const RunConfig& config);

/// Parses a comma-separated list of reals; ConfigError names `what`.
std::vector<double> parse_real_list(const std::string& text, const std::string& what);

}  // namespace mfg
