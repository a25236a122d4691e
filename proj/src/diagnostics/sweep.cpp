#include "mfgpi/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

namespace mfg {
namespace {

struct Task {
  std::size_t cell;
  std::size_t rung;
};

void run_task(const SolverConfig& base, double dt, SweepCell& cell, std::size_t rung, double horizon) {
  SolverConfig config = base;
  config.reference = nullptr;
  config.record_residuals = false;
  config.keep_field_history = false;
  ScenarioOverrides o;
  o.beta = cell.beta;
  o.zeta = cell.zeta;
  o.horizon = horizon;
  o.nodes = base.scenario.nodes;
  o.epsilon = base.scenario.epsilon;
  o.steps = std::max(1, static_cast<int>(std::lround(horizon / dt)));
  try {
    config.scenario = build_scenario(base.scenario.name, o);
    const SolveResult r = run_solver(config);
    cell.converged[rung] = r.solution.converged;
    cell.iterations[rung] = r.solution.iterations;
    if (!r.solution.converged) cell.notes[rung] = r.report.message;
  } catch (const std::exception& e) {
    cell.converged[rung] = false;
    cell.notes[rung] = e.what();
  }
}

std::string format_value(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

}  // namespace

SweepResult max_t_sweep(const SolverConfig& base, const std::vector<double>& betas,
                        const std::vector<double>& zetas, const std::vector<double>& ladder,
                        int jobs) {
  if (betas.empty() || zetas.empty() || ladder.empty())
    throw std::invalid_argument("sweep needs non-empty beta, zeta and T lists");
  for (std::size_t i = 1; i < ladder.size(); ++i)
    if (!(ladder[i] > ladder[i - 1])) throw std::invalid_argument("T ladder must be strictly increasing");
  if (!(ladder.front() > 0.0)) throw std::invalid_argument("T ladder entries must be positive");

  SweepResult result;
  result.betas = betas;
  result.zetas = zetas;
  result.ladder = ladder;
  for (double z : zetas)
    for (double b : betas) {
      SweepCell c;
      c.beta = b;
      c.zeta = z;
      c.converged.assign(ladder.size(), false);
      c.iterations.assign(ladder.size(), 0);
      c.notes.assign(ladder.size(), {});
      result.cells.push_back(std::move(c));
    }

  const double dt = base.scenario.horizon / base.scenario.steps;
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < result.cells.size(); ++c)
    for (std::size_t r = 0; r < ladder.size(); ++r) tasks.push_back({c, r});
  std::stable_sort(tasks.begin(), tasks.end(),
                   [](const Task& a, const Task& b) { return a.rung > b.rung; });

  // Each task writes only its own (cell, rung) slots.
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++)
      run_task(base, dt, result.cells[tasks[t].cell], tasks[t].rung, ladder[tasks[t].rung]);
  };
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (auto& c : result.cells) {
    for (std::size_t r = 0; r < ladder.size(); ++r)
      if (c.converged[r]) c.max_t = ladder[r];
    c.capped = c.converged.back();
    for (std::size_t r = 0; r < ladder.size(); ++r)
      if (!c.converged[r] && c.max_t > ladder[r]) c.non_monotone = true;
    if (c.non_monotone)
      result.warnings.push_back("beta=" + format_value(c.beta) + " zeta=" + format_value(c.zeta) +
                                ": fails at a horizon below a converged one");
  }

  std::vector<std::size_t> order(zetas.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return zetas[a] < zetas[b]; });
  for (std::size_t b = 0; b < betas.size(); ++b)
    for (std::size_t i = 1; i < order.size(); ++i) {
      const SweepCell& lo = result.cell(order[i - 1], b);
      const SweepCell& hi = result.cell(order[i], b);
      if (hi.max_t > lo.max_t)
        result.warnings.push_back("beta=" + format_value(betas[b]) + ": max T grows from zeta=" +
                                  format_value(lo.zeta) + " to zeta=" + format_value(hi.zeta));
    }
  return result;
}

}  // namespace mfg
