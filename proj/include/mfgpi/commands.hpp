#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mfg {

/// Process exit codes of the command-line tool.
enum ExitCode : int { kExitConverged = 0, kExitUsage = 1, kExitDiverged = 2 };

struct CommandOptions {
  std::optional<std::string> config_path;
  std::vector<std::string> sets;  // "key=value", applied after the file
  std::optional<std::string> output_dir;
  int jobs = 1;
};

/// Solves one configuration and writes density.csv, value.csv, policy.csv,
/// history.csv and manifest.json into the output directory.
int cmd_run(const CommandOptions& options, std::ostream& out, std::ostream& err);

/// Runs every listed algorithm on the same configuration. When fixed_point is
/// among them it runs first and serves as the reference for the gap columns.
/// Writes compare_history.csv, compare_timing.csv and manifest.json.
int cmd_compare(const CommandOptions& options, const std::vector<std::string>& algorithms,
                std::ostream& out, std::ostream& err);

struct SweepOptions {
  std::vector<double> betas{1.5, 1.2, 1.0, 0.8};
  std::vector<double> zetas{0.8, 0.6, 0.4, 0.2};
  std::vector<double> ladder{0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0};
};

/// Largest converged horizon per (beta, zeta). Unset I, N and max_iters
/// default to 100, 100 and 200. Writes max_t_grid.csv, sweep_cells.csv and
/// manifest.json.
int cmd_sweep(const CommandOptions& options, const SweepOptions& sweep, std::ostream& out,
              std::ostream& err);

}  // namespace mfg
