#include "mfgpi/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>

#include "mfgpi/config.hpp"
#include "mfgpi/output.hpp"
#include "mfgpi/simd.hpp"
#include "mfgpi/sweep.hpp"

#ifndef MFGPI_VERSION
#define MFGPI_VERSION "unknown"
#endif

namespace mfg {

namespace {

namespace fs = std::filesystem;

RunConfig load_run_config(const CommandOptions& options) {
  RunConfig config = options.config_path ? load_config_file(*options.config_path) : RunConfig{};
  apply_overrides(config, options.sets);
  if (options.output_dir) config.output_dir = *options.output_dir;
  return config;
}

void prepare_output_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw std::runtime_error("cannot create output directory '" + dir + "'");
  }
}

std::string in_dir(const std::string& dir, const char* name) { return (fs::path(dir) / name).string(); }

nlohmann::json software_json() {
  return {{"name", "mfgpi"},
          {"version", MFGPI_VERSION},
          {"simd", std::string(simd::isa_name(simd::active_isa()))}};
}

nlohmann::json json_real(double v) {
  if (std::isfinite(v)) return v;
  return format_real(v);
}

nlohmann::json timings_json(const PhaseTimings& t) {
  return {{"fp", t.fp},         {"hjb", t.hjb},
          {"policy", t.policy}, {"newton", t.newton},
          {"diagnostics", t.diagnostics}, {"solve_total", t.solve_total()}};
}

int exit_code_for(SolveStatus status) {
  return status == SolveStatus::converged ? kExitConverged : kExitDiverged;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

int cmd_run(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  RunConfig config;
  SolverConfig solver_config;
  nlohmann::json manifest;
  try {
    config = load_run_config(options);
    solver_config = to_solver_config(config);
    manifest["config"] = resolved_config_json(config);
    prepare_output_dir(config.output_dir);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  const std::string dir = config.output_dir;
  manifest["command"] = "run";
  manifest["software"] = software_json();
  manifest["started_at"] = timestamp_now();
  const auto start = std::chrono::steady_clock::now();

  int code = kExitConverged;
  std::optional<SolveResult> result;
  try {
    result = run_solver(solver_config);
    code = exit_code_for(result->report.status);
    manifest["verdict"] = to_string(result->report.status);
    manifest["message"] = result->report.message;
  } catch (const std::invalid_argument& e) {
    code = kExitUsage;
    manifest["verdict"] = "error";
    manifest["message"] = e.what();
  } catch (const std::exception& e) {
    code = kExitDiverged;
    manifest["verdict"] = "numerical_failure";
    manifest["message"] = e.what();
  }
  manifest["finished_at"] = timestamp_now();
  manifest["wall_seconds"] = seconds_since(start);

  nlohmann::json outputs = nlohmann::json::array();
  try {
    if (result) {
      const ScenarioPreset& p = solver_config.scenario;
      const SpaceGrid grid = p.space_grid();
      const TimeGrid time = p.time_grid();
      const Solution& s = result->solution;
      if (s.iterations > 0) {
        write_density_csv(in_dir(dir, "density.csv"), grid, time, s.m);
        write_value_csv(in_dir(dir, "value.csv"), grid, time, s.u);
        write_policy_csv(in_dir(dir, "policy.csv"), grid, time, s.q);
        outputs = {"density.csv", "value.csv", "policy.csv"};
      }
      write_history_csv(in_dir(dir, "history.csv"), result->report);
      outputs.push_back("history.csv");
      manifest["iterations"] = s.iterations;
      manifest["newton_iterations"] = result->report.newton_iterations;
      manifest["fitted_rate"] = json_real(result->report.fitted_rate);
      manifest["fit_r2"] = json_real(result->report.fit_r2);
      manifest["timings"] = timings_json(result->report.timings);
    }
    outputs.push_back("manifest.json");
    manifest["outputs"] = outputs;
    manifest["exit_code"] = code;
    write_json(in_dir(dir, "manifest.json"), manifest);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  out << manifest["verdict"].get<std::string>();
  if (result) {
    out << " after " << result->solution.iterations << " iterations";
    if (!result->report.history.empty()) {
      out << ", d_density " << format_real(result->report.history.back().d_density);
    }
  }
  out << " (" << manifest["message"].get<std::string>() << ")\n";
  out << "outputs in " << dir << '\n';
  return code;
}

int cmd_compare(const CommandOptions& options, const std::vector<std::string>& algorithms,
                std::ostream& out, std::ostream& err) {
  RunConfig config;
  SolverConfig base;
  std::vector<Algorithm> order;
  nlohmann::json manifest;
  try {
    std::set<Algorithm> seen;
    for (const auto& name : algorithms) {
      const auto a = parse_algorithm(name);
      if (!a) throw ConfigError("algorithms", "unknown algorithm '" + name + "'");
      if (seen.insert(*a).second) order.push_back(*a);
    }
    if (order.size() < 2) throw ConfigError("algorithms", "compare needs at least two algorithms");

    std::stable_partition(order.begin(), order.end(),
                          [](Algorithm a) { return a == Algorithm::fixed_point; });
    config = load_run_config(options);
    base = to_solver_config(config);
    manifest["config"] = resolved_config_json(config);
    prepare_output_dir(config.output_dir);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  const std::string dir = config.output_dir;
  manifest["command"] = "compare";
  manifest["software"] = software_json();
  manifest["started_at"] = timestamp_now();

  struct Entry {
    Algorithm algorithm;
    std::optional<SolveResult> result;
    std::string verdict;
    std::string message;
  };
  std::vector<Entry> entries;
  entries.reserve(order.size());
  const Solution* reference = nullptr;
  int code = kExitConverged;
  for (Algorithm a : order) {
    SolverConfig c = base;
    c.algorithm = a;
    c.reference = reference;
    Entry e{a, std::nullopt, {}, {}};
    try {
      e.result = run_solver(c);
      e.verdict = to_string(e.result->report.status);
      e.message = e.result->report.message;
      if (e.result->report.status != SolveStatus::converged) code = kExitDiverged;
    } catch (const std::exception& ex) {
      e.verdict = "numerical_failure";
      e.message = ex.what();
      code = kExitDiverged;
    }
    entries.push_back(std::move(e));
    if (a == Algorithm::fixed_point && entries.back().result &&
        entries.back().result->solution.converged) {
      reference = &entries.back().result->solution;
    }
    out << std::left << std::setw(12) << to_string(a) << ' ' << entries.back().verdict;
    if (entries.back().result) out << " after " << entries.back().result->solution.iterations;
    out << '\n';
  }
  manifest["finished_at"] = timestamp_now();

  try {
    std::ofstream hist(in_dir(dir, "compare_history.csv"));
    if (!hist) throw std::runtime_error("cannot write compare_history.csv in '" + dir + "'");
    hist << "iteration";
    std::size_t rows = 0;
    for (const auto& e : entries) {
      const std::string n = to_string(e.algorithm);
      for (const char* col : {"d_density", "res_hjb", "res_fp", "gap_u", "gap_m", "gap_q"})
        hist << ',' << n << '_' << col;
      if (e.result) rows = std::max(rows, e.result->report.history.size());
    }
    hist << '\n';
    for (std::size_t k = 0; k < rows; ++k) {
      hist << k + 1;
      for (const auto& e : entries) {
        if (e.result && k < e.result->report.history.size()) {
          const IterationRecord& r = e.result->report.history[k];
          for (double v : {r.d_density, r.res_hjb, r.res_fp, r.gap_u, r.gap_m, r.gap_q})
            hist << ',' << format_real(v);
        } else {
          hist << ",,,,,,";
        }
      }
      hist << '\n';
    }
    if (!hist.flush()) throw std::runtime_error("error while writing compare_history.csv");

    std::ofstream timing(in_dir(dir, "compare_timing.csv"));
    if (!timing) throw std::runtime_error("cannot write compare_timing.csv in '" + dir + "'");
    timing << "algorithm,verdict,iterations,newton_iterations,fp_seconds,hjb_seconds,"
              "policy_seconds,newton_seconds,solve_seconds\n";
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& e : entries) {
      timing << to_string(e.algorithm) << ',' << e.verdict;
      nlohmann::json run = {{"algorithm", to_string(e.algorithm)},
                            {"verdict", e.verdict},
                            {"message", e.message}};
      if (e.result) {
        const auto& t = e.result->report.timings;
        timing << ',' << e.result->solution.iterations << ',' << e.result->report.newton_iterations
               << ',' << format_real(t.fp) << ',' << format_real(t.hjb) << ','
               << format_real(t.policy) << ',' << format_real(t.newton) << ','
               << format_real(t.solve_total());
        run["iterations"] = e.result->solution.iterations;
        run["timings"] = timings_json(t);
        run["fitted_rate"] = json_real(e.result->report.fitted_rate);
      } else {
        timing << ",,,,,,,";
      }
      timing << '\n';
      runs.push_back(run);
    }
    if (!timing.flush()) throw std::runtime_error("error while writing compare_timing.csv");

    manifest["runs"] = runs;
    manifest["reference"] = reference ? "fixed_point" : "none";
    manifest["outputs"] = {"compare_history.csv", "compare_timing.csv", "manifest.json"};
    manifest["exit_code"] = code;
    write_json(in_dir(dir, "manifest.json"), manifest);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  out << "outputs in " << dir << '\n';
  return code;
}

int cmd_sweep(const CommandOptions& options, const SweepOptions& sweep, std::ostream& out,
              std::ostream& err) {
  RunConfig config;
  SolverConfig base;
  nlohmann::json manifest;
  try {
    if (options.jobs < 1) throw ConfigError("jobs", "must be at least 1");
    config = load_run_config(options);
    if (!config.nodes) config.nodes = 100;
    if (!config.max_iters) config.max_iters = 200;
    if (!config.steps) {
      const double horizon =
          config.horizon.value_or(to_solver_config(config).scenario.horizon);
      config.steps = std::max(1, static_cast<int>(std::lround(horizon * *config.nodes)));
    }
    base = to_solver_config(config);
    manifest["config"] = resolved_config_json(config);
    prepare_output_dir(config.output_dir);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  const std::string dir = config.output_dir;
  manifest["command"] = "sweep";
  manifest["software"] = software_json();
  manifest["started_at"] = timestamp_now();
  manifest["betas"] = sweep.betas;
  manifest["zetas"] = sweep.zetas;
  manifest["ladder"] = sweep.ladder;
  manifest["jobs"] = options.jobs;

  SweepResult result;
  try {
    result = max_t_sweep(base, sweep.betas, sweep.zetas, sweep.ladder, options.jobs);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  manifest["finished_at"] = timestamp_now();
  manifest["warnings"] = result.warnings;

  try {
    std::ofstream grid(in_dir(dir, "max_t_grid.csv"));
    if (!grid) throw std::runtime_error("cannot write max_t_grid.csv in '" + dir + "'");
    grid << "zeta\\beta";
    for (double b : result.betas) grid << ',' << format_real(b);
    grid << '\n';
    for (std::size_t z = 0; z < result.zetas.size(); ++z) {
      grid << format_real(result.zetas[z]);
      for (std::size_t b = 0; b < result.betas.size(); ++b)
        grid << ',' << format_real(result.cell(z, b).max_t);
      grid << '\n';
    }
    if (!grid.flush()) throw std::runtime_error("error while writing max_t_grid.csv");

    std::ofstream cells(in_dir(dir, "sweep_cells.csv"));
    if (!cells) throw std::runtime_error("cannot write sweep_cells.csv in '" + dir + "'");
    cells << "beta,zeta,T,converged,iterations,note\n";
    for (const auto& c : result.cells) {
      for (std::size_t r = 0; r < result.ladder.size(); ++r) {
        cells << format_real(c.beta) << ',' << format_real(c.zeta) << ','
              << format_real(result.ladder[r]) << ',' << (c.converged[r] ? 1 : 0) << ','
              << c.iterations[r] << ',' << csv_quote(c.notes[r]) << '\n';
      }
    }
    if (!cells.flush()) throw std::runtime_error("error while writing sweep_cells.csv");

    manifest["outputs"] = {"max_t_grid.csv", "sweep_cells.csv", "manifest.json"};
    manifest["exit_code"] = kExitConverged;
    write_json(in_dir(dir, "manifest.json"), manifest);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  out << "largest converged T (rows zeta, columns beta)\n" << std::setw(8) << "zeta";
  for (double b : result.betas) out << std::setw(8) << b;
  out << '\n';
  for (std::size_t z = 0; z < result.zetas.size(); ++z) {
    out << std::setw(8) << result.zetas[z];
    for (std::size_t b = 0; b < result.betas.size(); ++b) {
      const SweepCell& c = result.cell(z, b);
      std::string text;
      if (c.max_t == 0.0) {
        text = "<" + format_real(result.ladder.front());
      } else {
        text = (c.capped ? ">=" : "") + format_real(c.max_t);
      }
      out << std::setw(8) << text;
    }
    out << '\n';
  }
  for (const auto& w : result.warnings) out << "warning: " << w << '\n';
  out << "outputs in " << dir << '\n';
  return kExitConverged;
}

}  // namespace mfg
