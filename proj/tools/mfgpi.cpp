#include <CLI11.hpp>
#include <iostream>

#include "mfgpi/commands.hpp"
#include "mfgpi/config.hpp"

namespace {

void add_common(CLI::App* cmd, mfg::CommandOptions& o, std::string& output_dir) {
  cmd->add_option("--config", o.config_path, "Configuration file (key = value, or a run manifest)");
  cmd->add_option("--set", o.sets, "Override one key, as key=value (repeatable)");
  cmd->add_option("--output-dir", output_dir, "Directory for outputs");
  cmd->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Policy iteration and fixed-point solvers for mean field games with congestion"};
  app.set_version_flag("--version", std::string(MFGPI_VERSION));
  app.require_subcommand(1);

  mfg::CommandOptions options;
  std::string output_dir;
  std::vector<std::string> algorithms{"pi1", "pi2", "fixed_point"};
  std::string betas, zetas, ladder;

  auto* run = app.add_subcommand("run", "Solve one configuration");
  add_common(run, options, output_dir);

  auto* compare = app.add_subcommand("compare", "Run several algorithms on one configuration");
  add_common(compare, options, output_dir);
  compare->add_option("--algorithms", algorithms, "Algorithms to compare (pi1, pi2, fixed_point)")
      ->delimiter(',');

  auto* sweep = app.add_subcommand("sweep", "Largest converged horizon over (beta, zeta)");
  add_common(sweep, options, output_dir);
  sweep->add_option("--betas", betas, "Comma-separated beta values");
  sweep->add_option("--zetas", zetas, "Comma-separated zeta values");
  sweep->add_option("--T-ladder", ladder, "Comma-separated increasing horizons");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : mfg::kExitUsage;
  }
  if (!output_dir.empty()) options.output_dir = output_dir;

  if (run->parsed()) return mfg::cmd_run(options, std::cout, std::cerr);
  if (compare->parsed()) return mfg::cmd_compare(options, algorithms, std::cout, std::cerr);

  mfg::SweepOptions sweep_options;
  try {
    if (!betas.empty()) sweep_options.betas = mfg::parse_real_list(betas, "betas");
    if (!zetas.empty()) sweep_options.zetas = mfg::parse_real_list(zetas, "zetas");
    if (!ladder.empty()) sweep_options.ladder = mfg::parse_real_list(ladder, "T-ladder");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return mfg::kExitUsage;
  }
  return mfg::cmd_sweep(options, sweep_options, std::cout, std::cerr);
}
