#include "mfgpi/solvers.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>

#include "mfgpi/operators.hpp"

namespace mfg {

std::optional<Algorithm> parse_algorithm(const std::string& name) {
  if (name == "pi1") return Algorithm::pi1;
  if (name == "pi2") return Algorithm::pi2;
  if (name == "fixed_point") return Algorithm::fixed_point;
  return std::nullopt;
}

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::pi1:
      return "pi1";
    case Algorithm::pi2:
      return "pi2";
    case Algorithm::fixed_point:
      return "fixed_point";
  }
  return "unknown";
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string short_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Adds the wall time of fn() to `bucket`.
template <class Fn>
auto timed(double& bucket, Fn&& fn) {
  const auto t0 = Clock::now();
  if constexpr (std::is_void_v<decltype(fn())>) {
    fn();
    bucket += elapsed(t0);
  } else {
    auto result = fn();
    bucket += elapsed(t0);
    return result;
  }
}

struct Problem {
  const ScenarioPreset& scenario;
  SpaceGrid grid;
  TimeGrid time;
  ScalarField m0;
  ScalarField u_terminal;

  explicit Problem(const ScenarioPreset& s)
      : scenario(s),
        grid(s.space_grid()),
        time(s.time_grid()),
        m0(s.initial_density(grid)),
        u_terminal(s.terminal_cost(grid)) {}

  const HamiltonianModel& model() const { return scenario.model; }
  double epsilon() const { return scenario.epsilon; }
};

void validate(const SolverConfig& c, const Problem& p) {
  if (!(c.tol_density > 0.0)) throw std::invalid_argument("tol_density must be positive");
  if (c.max_outer_iters < 1) throw std::invalid_argument("max_outer_iters must be >= 1");
  if (!(c.bound > 0.0)) throw std::invalid_argument("policy bound R must be positive");
  if (!(c.blowup_threshold > 0.0)) throw std::invalid_argument("blow-up threshold must be positive");
  if (!(p.scenario.epsilon > 0.0)) throw std::invalid_argument("viscosity epsilon must be positive");
  if (!c.initial_policy.empty()) {
    if (c.initial_policy.size() != static_cast<std::size_t>(p.time.steps()))
      throw std::invalid_argument("initial policy must hold N slices");
    for (const auto& q : c.initial_policy)
      if (q.dim() != p.grid.dim() || q.node_count() != p.grid.size())
        throw std::invalid_argument("initial policy slice does not match the grid");
  }
  if (c.reference) {
    const auto& r = *c.reference;
    if (r.u.slice_count() != static_cast<std::size_t>(p.time.steps()) + 1 ||
        r.u.node_count() != p.grid.size() || r.q.size() != static_cast<std::size_t>(p.time.steps()))
      throw std::invalid_argument("reference solution does not match the grids");
  }
}

bool within(std::span<const double> values, double threshold) {
  for (double v : values)
    if (!(std::fabs(v) <= threshold)) return false;
  return true;
}

bool blown_up(const TimeField& u, const TimeField& m, const PolicyTimeField& q, double threshold) {
  if (!within(u.values(), threshold) || !within(m.values(), threshold)) return true;
  for (const auto& slice : q)
    if (!within(slice.values(), threshold)) return true;
  return false;
}

struct Iterate {
  TimeField u;
  TimeField m;
  PolicyTimeField q;
};

// Shared outer loop: bookkeeping, stopping rule and blow-up detection. `step`
// performs one full pass and returns the new iterate.
SolveResult outer_loop(const SolverConfig& config, const Problem& p,
                       std::optional<TimeField> m_initial_guess,
                       const std::function<Iterate(int pass, PhaseTimings&)>& step) {
  SolveResult out;
  auto& report = out.report;
  const auto start = Clock::now();
  std::optional<TimeField> m_prev = std::move(m_initial_guess);

  for (int pass = 1; pass <= config.max_outer_iters; ++pass) {
    Iterate it = step(pass, report.timings);

    if (blown_up(it.u, it.m, it.q, config.blowup_threshold)) {
      report.status = SolveStatus::diverged;
      report.message = "iterate exceeded " + short_real(config.blowup_threshold) +
                       " or became non-finite at pass " + std::to_string(pass);
      break;
    }

    IterationRecord rec;
    rec.iteration = pass;
    if (m_prev) rec.d_density = max_abs_diff(it.m.values(), m_prev->values());
    timed(report.timings.diagnostics, [&] {
      if (config.record_residuals) {
        const MfgResiduals r = residual_mfg(p.model(), it.u, it.m, p.grid, p.time, p.epsilon());
        rec.res_hjb = r.res_hjb;
        rec.res_fp = r.res_fp;
      }
      if (config.reference) {
        rec.gap_u = linf_gap(it.u, config.reference->u);
        rec.gap_m = linf_gap(it.m, config.reference->m);
        rec.gap_q = linf_gap(it.q, config.reference->q);
      }
    });
    rec.seconds = elapsed(start);
    report.history.push_back(rec);

    if (config.keep_field_history) {
      report.u_history.push_back(it.u);
      report.m_history.push_back(it.m);
      report.q_history.push_back(it.q);
    }

    m_prev = it.m;
    out.solution.u = std::move(it.u);
    out.solution.m = std::move(it.m);
    out.solution.q = std::move(it.q);
    out.solution.iterations = pass;

    if (rec.d_density <= config.tol_density) {
      report.status = SolveStatus::converged;
      out.solution.converged = true;
      report.message = "density difference " + short_real(rec.d_density) + " after " +
                       std::to_string(pass) + " passes";
      break;
    }
  }
  if (report.status == SolveStatus::max_iterations)
    report.message = "no convergence within " + std::to_string(config.max_outer_iters) + " passes";

  std::size_t first = 0, last = 0;
  if (rate_window(report, 5, 1e-7, first, last)) {
    const RateFit fit = fit_linear_rate(report.density_differences(), first, last);
    report.fitted_rate = fit.rate;
    report.fit_r2 = fit.r2;
  }
  return out;
}

TimeField lagrangian_sources(const Problem& p, const TimeField& m, const PolicyTimeField& q) {
  TimeField s(q.size(), p.grid.size());
  for (std::size_t n = 0; n < q.size(); ++n)
    s.set_slice(n, lagrangian_source(p.model(), m.slice(n + 1), eo_split(q[n])));
  return s;
}

PolicyTimeField initial_policy(const SolverConfig& config, const Problem& p) {
  return config.initial_policy.empty() ? zero_policy(p.grid, p.time) : config.initial_policy;
}

}  // namespace

SolveResult pi1_solve(const SolverConfig& config) {
  const Problem p(config.scenario);
  validate(config, p);
  LinearSolver solver(config.linear);
  PolicyTimeField q = initial_policy(config, p);
  std::optional<TimeField> u_prev;

  return outer_loop(config, p, std::nullopt, [&](int, PhaseTimings& t) {
    Iterate it;
    it.m = timed(t.fp, [&] { return fp_forward(p.m0, q, p.grid, p.time, p.epsilon(), solver); });
    it.u = timed(t.hjb, [&] {
      TimeField s;
      if (config.pi1_source == Pi1Source::perturbed && u_prev) {
        s = TimeField(q.size(), p.grid.size());
        for (std::size_t n = 0; n < q.size(); ++n)
          s.set_slice(n, perturbed_lagrangian_source(p.model(), p.grid, it.m.slice(n + 1),
                                                     eo_split(q[n]), u_prev->slice(n)));
      } else {
        s = lagrangian_sources(p, it.m, q);
      }
      return hjb_backward_linear(p.u_terminal, q, s, p.grid, p.time, p.epsilon(), solver);
    });
    it.q = timed(t.policy, [&] { return policy_update(p.model(), p.grid, it.u, it.m, config.bound); });
    q = it.q;
    if (config.pi1_source == Pi1Source::perturbed) u_prev = it.u;
    return it;
  });
}

SolveResult pi2_solve(const SolverConfig& config) {
  const Problem p(config.scenario);
  validate(config, p);
  LinearSolver solver(config.linear);
  PolicyTimeField q = initial_policy(config, p);
  std::optional<TimeField> u_tilde_prev;

  return outer_loop(config, p, std::nullopt, [&](int, PhaseTimings& t) {
    Iterate it;
    it.m = timed(t.fp, [&] { return fp_forward(p.m0, q, p.grid, p.time, p.epsilon(), solver); });
    const PolicyTimeField q_tilde = timed(t.policy, [&] {
      return u_tilde_prev ? policy_update(p.model(), p.grid, *u_tilde_prev, it.m, config.bound) : q;
    });
    it.u = timed(t.hjb, [&] {
      const TimeField s = lagrangian_sources(p, it.m, q_tilde);
      return hjb_backward_linear(p.u_terminal, q_tilde, s, p.grid, p.time, p.epsilon(), solver);
    });
    it.q = timed(t.policy, [&] { return policy_update(p.model(), p.grid, it.u, it.m, config.bound); });
    q = it.q;
    u_tilde_prev = it.u;
    return it;
  });
}

SolveResult fixed_point_solve(const SolverConfig& config) {
  const Problem p(config.scenario);
  validate(config, p);
  LinearSolver solver(config.linear);
  const std::size_t slices = static_cast<std::size_t>(p.time.steps()) + 1;
  // U(0) = 0, M(0) = 1.
  TimeField m_guess(slices, p.grid.size(), 1.0);
  PolicyTimeField drift = zero_policy(p.grid, p.time);
  int newton_total = 0;

  SolveResult result = outer_loop(config, p, m_guess, [&](int, PhaseTimings& t) {
    Iterate it;
    it.m = timed(t.fp, [&] { return fp_forward(p.m0, drift, p.grid, p.time, p.epsilon(), solver); });
    NewtonStats stats;
    it.u = timed(t.newton, [&] {
      return hjb_backward_newton(p.model(), p.u_terminal, it.m, p.grid, p.time, p.epsilon(),
                                 config.newton, solver, nullptr, &stats);
    });
    newton_total += stats.total_iterations;
    it.q = timed(t.policy, [&] { return policy_update(p.model(), p.grid, it.u, it.m, config.bound); });
    drift = it.q;
    return it;
  });
  result.report.newton_iterations = newton_total;
  return result;
}

SolveResult run_solver(const SolverConfig& config) {
  switch (config.algorithm) {
    case Algorithm::pi1:
      return pi1_solve(config);
    case Algorithm::pi2:
      return pi2_solve(config);
    case Algorithm::fixed_point:
      return fixed_point_solve(config);
  }
  throw std::invalid_argument("unknown algorithm");
}

}  // namespace mfg
