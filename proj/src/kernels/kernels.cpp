#include "mfgpi/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mfgpi/operators.hpp"
#include "mfgpi/simd.hpp"

namespace mfg {
namespace {

constexpr double kNegativeDensitySlack = 1e-10;

double clip_density(double m) {
  if (!(m >= -kNegativeDensitySlack))
    throw std::domain_error("density " + std::to_string(m) + " is negative beyond round-off");
  return m < 0.0 ? 0.0 : m;
}

void require_policy_steps(const PolicyTimeField& q, const TimeGrid& time, const SpaceGrid& grid) {
  if (q.size() != static_cast<std::size_t>(time.steps()))
    throw std::invalid_argument("policy field must hold N = " + std::to_string(time.steps()) +
                                " slices, got " + std::to_string(q.size()));
  for (const auto& slice : q)
    if (slice.dim() != grid.dim() || slice.node_count() != grid.size())
      throw std::invalid_argument("policy slice shape does not match grid");
}

void require_time_field(const TimeField& f, std::size_t slices, const SpaceGrid& grid,
                        const char* what) {
  if (f.slice_count() < slices || f.node_count() != grid.size())
    throw std::invalid_argument(std::string(what) + ": field shape does not match grids");
}

// |P|^2 per node where P is the EO split of the one-sided gradient.
ScalarField split_norm_sq(const StaggeredPolicy& split) {
  const auto& k = simd::kernels();
  ScalarField s(split.node_count(), 0.0);
  for (std::size_t c = 0; c < split.component_count(); ++c)
    k.accumulate_square(s.data(), split.component(c).data(), split.node_count());
  return s;
}

}  // namespace

TimeField fp_forward(std::span<const double> m0, const PolicyTimeField& q, const SpaceGrid& grid,
                     const TimeGrid& time, double epsilon, LinearSolver& solver) {
  if (m0.size() != grid.size()) throw std::invalid_argument("fp_forward: m0 does not match grid");
  require_policy_steps(q, time, grid);
  const std::size_t steps = static_cast<std::size_t>(time.steps());
  TimeField m(steps + 1, grid.size());
  m.set_slice(0, m0);
  for (std::size_t n = 0; n < steps; ++n) {
    const SparseOperator a = assemble_fp_matrix(grid, time.dt(), epsilon, eo_split(q[n]));
    try {
      solver.solve(a, m.slice(n), m.slice(n + 1));
    } catch (const LinearSolveError& e) {
      throw LinearSolveError("FP step to time index " + std::to_string(n + 1) + ": " + e.what(),
                             e.achieved_residual());
    }
  }
  return m;
}

TimeField fp_forward(std::span<const double> m0, const PolicyTimeField& q, const SpaceGrid& grid,
                     const TimeGrid& time, double epsilon) {
  LinearSolver solver;
  return fp_forward(m0, q, grid, time, epsilon, solver);
}

TimeField hjb_backward_linear(std::span<const double> u_terminal, const PolicyTimeField& q,
                              const TimeField& source, const SpaceGrid& grid, const TimeGrid& time,
                              double epsilon, LinearSolver& solver) {
  if (u_terminal.size() != grid.size())
    throw std::invalid_argument("hjb_backward_linear: terminal data does not match grid");
  require_policy_steps(q, time, grid);
  const std::size_t steps = static_cast<std::size_t>(time.steps());
  require_time_field(source, steps, grid, "hjb_backward_linear source");
  const double dt = time.dt();

  TimeField u(steps + 1, grid.size());
  u.set_slice(steps, u_terminal);
  ScalarField rhs(grid.size());
  for (std::size_t n = steps; n-- > 0;) {
    const auto next = u.slice(n + 1);
    const auto s = source.slice(n);
    for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] = next[k] + dt * s[k];
    const SparseOperator a = assemble_hjb_matrix(grid, dt, epsilon, eo_split(q[n]));
    try {
      solver.solve(a, rhs, u.slice(n));
    } catch (const LinearSolveError& e) {
      throw LinearSolveError("HJB step to time index " + std::to_string(n) + ": " + e.what(),
                             e.achieved_residual());
    }
  }
  return u;
}

TimeField hjb_backward_linear(std::span<const double> u_terminal, const PolicyTimeField& q,
                              const TimeField& source, const SpaceGrid& grid, const TimeGrid& time,
                              double epsilon) {
  LinearSolver solver;
  return hjb_backward_linear(u_terminal, q, source, grid, time, epsilon, solver);
}

ScalarField lagrangian_source(const HamiltonianModel& model, std::span<const double> m_next,
                              const StaggeredPolicy& qpm) {
  if (m_next.size() != qpm.node_count())
    throw std::invalid_argument("lagrangian_source: density does not match policy");
  const ScalarField q2 = eo_norm_sq(qpm);
  ScalarField out(q2.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double m = clip_density(m_next[k]);
    out[k] = model.kinetic_lagrangian_from_norm_sq(m, q2[k]) + model.zeta() * m;
  }
  return out;
}

ScalarField perturbed_lagrangian_source(const HamiltonianModel& model, const SpaceGrid& grid,
                                        std::span<const double> m_next, const StaggeredPolicy& qpm,
                                        std::span<const double> u_prev) {
  ScalarField out = advect(grid, qpm, u_prev);
  const ScalarField h = discrete_hamiltonian(model, grid, u_prev, m_next);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] -= h[k];
  return out;
}

StaggeredPolicy policy_slice(const HamiltonianModel& model, const SpaceGrid& grid,
                             std::span<const double> u, std::span<const double> m_next,
                             double bound) {
  if (m_next.size() != grid.size()) throw std::invalid_argument("policy_slice: density size");
  if (!(bound > 0.0)) throw std::invalid_argument("policy bound R must be positive");
  StaggeredPolicy q = upwind_gradient(grid, u);
  const ScalarField s = split_norm_sq(eo_split(q));
  ScalarField factor(grid.size());
  for (std::size_t k = 0; k < factor.size(); ++k)
    factor[k] = model.grad_factor_from_norm_sq(clip_density(m_next[k]), s[k]);
  const auto& kern = simd::kernels();
  for (std::size_t c = 0; c < q.component_count(); ++c) {
    auto comp = q.component(c);
    kern.multiply(comp.data(), comp.data(), factor.data(), comp.size());
    if (!std::isinf(bound))
      for (double& v : comp) v = std::clamp(v, -bound, bound);
  }
  return q;
}

PolicyTimeField policy_update(const HamiltonianModel& model, const SpaceGrid& grid,
                              const TimeField& u, const TimeField& m, double bound) {
  if (u.slice_count() < 2 || !u.same_shape(m) || u.node_count() != grid.size())
    throw std::invalid_argument("policy_update: U and M must share one space-time shape");
  const std::size_t steps = u.slice_count() - 1;
  PolicyTimeField q;
  q.reserve(steps);
  for (std::size_t n = 0; n < steps; ++n)
    q.push_back(policy_slice(model, grid, u.slice(n), m.slice(n + 1), bound));
  return q;
}

ScalarField discrete_hamiltonian(const HamiltonianModel& model, const SpaceGrid& grid,
                                 std::span<const double> u, std::span<const double> m) {
  if (m.size() != grid.size()) throw std::invalid_argument("discrete_hamiltonian: density size");
  const ScalarField s = split_norm_sq(eo_split(upwind_gradient(grid, u)));
  ScalarField h(grid.size());
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double mk = clip_density(m[k]);
    h[k] = model.kinetic_from_norm_sq(mk, s[k]) - model.zeta() * mk;
  }
  return h;
}

ScalarField hjb_step_residual(const HamiltonianModel& model, const SpaceGrid& grid, double dt,
                              double epsilon, std::span<const double> u,
                              std::span<const double> u_next, std::span<const double> m_next) {
  if (u.size() != grid.size() || u_next.size() != grid.size())
    throw std::invalid_argument("hjb_step_residual: value field size");
  ScalarField f = discrete_hamiltonian(model, grid, u, m_next);
  const ScalarField lap = laplacian_apply(grid, u);
  const double inv_dt = 1.0 / dt;
  for (std::size_t k = 0; k < f.size(); ++k)
    f[k] += (u[k] - u_next[k]) * inv_dt - epsilon * lap[k];
  return f;
}

SparseOperator newton_jacobian(const HamiltonianModel& model, std::span<const double> m_next,
                               std::span<const double> u, const SpaceGrid& grid,
                               const TimeGrid& time, double epsilon) {
  const StaggeredPolicy qpm = eo_split(policy_slice(model, grid, u, m_next, kUnbounded));
  const SparseOperator a = assemble_hjb_matrix(grid, time.dt(), epsilon, qpm);
  return SparseOperator(SparseOperator::Matrix(a.matrix() * (1.0 / time.dt())));
}

TimeField hjb_backward_newton(const HamiltonianModel& model, std::span<const double> u_terminal,
                              const TimeField& m, const SpaceGrid& grid, const TimeGrid& time,
                              double epsilon, const NewtonSettings& settings, LinearSolver& solver,
                              const TimeField* warm_start, NewtonStats* stats) {
  if (!(settings.tol > 0.0) || settings.max_iters < 1)
    throw std::invalid_argument("Newton settings need tol > 0 and max_iters >= 1");
  if (u_terminal.size() != grid.size())
    throw std::invalid_argument("hjb_backward_newton: terminal data does not match grid");
  const std::size_t steps = static_cast<std::size_t>(time.steps());
  require_time_field(m, steps + 1, grid, "hjb_backward_newton density");
  if (warm_start) require_time_field(*warm_start, steps + 1, grid, "hjb_backward_newton warm start");
  if (stats) stats->residual_history.assign(steps, {});

  const double dt = time.dt();
  TimeField u(steps + 1, grid.size());
  u.set_slice(steps, u_terminal);
  ScalarField cur(grid.size()), trial(grid.size()), delta(grid.size()), rhs(grid.size());

  for (std::size_t n = steps; n-- > 0;) {
    const auto next = u.slice(n + 1);
    const auto m_next = m.slice(n + 1);
    const auto guess = warm_start ? warm_start->slice(n) : next;
    std::copy(guess.begin(), guess.end(), cur.begin());

    auto norm = [](const ScalarField& f) {
      double r = 0.0;
      for (double v : f) r = std::max(r, std::fabs(v));
      return std::isfinite(r) ? r : std::numeric_limits<double>::infinity();
    };
    ScalarField f = hjb_step_residual(model, grid, dt, epsilon, cur, next, m_next);
    double r = norm(f);
    std::vector<double>* history = stats ? &stats->residual_history[n] : nullptr;
    if (history) history->push_back(r);

    int it = 0;
    while (r > settings.tol) {
      if (it >= settings.max_iters || !std::isfinite(r))
        throw NewtonError("Newton did not converge at time index " + std::to_string(n) +
                              " (residual " + std::to_string(r) + " after " + std::to_string(it) +
                              " iterations)",
                          static_cast<int>(n), r);
      const SparseOperator jac = newton_jacobian(model, m_next, cur, grid, time, epsilon);
      for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] = -f[k];
      try {
        solver.solve(jac, rhs, delta);
      } catch (const LinearSolveError& e) {
        throw NewtonError("singular Newton Jacobian at time index " + std::to_string(n) + ": " +
                              e.what(),
                          static_cast<int>(n), r);
      }
      double step = 1.0;
      ScalarField f_trial;
      double r_trial = 0.0;
      for (int halvings = 0;; ++halvings) {
        for (std::size_t k = 0; k < cur.size(); ++k) trial[k] = cur[k] + step * delta[k];
        f_trial = hjb_step_residual(model, grid, dt, epsilon, trial, next, m_next);
        r_trial = norm(f_trial);
        if (r_trial <= 10.0 * r || halvings >= 30) break;
        step *= 0.5;
      }
      if (step < 1.0 && stats) ++stats->damped_steps;
      cur.swap(trial);
      f.swap(f_trial);
      r = r_trial;
      ++it;
      if (history) history->push_back(r);
    }
    u.set_slice(n, cur);
    if (stats) {
      stats->total_iterations += it;
      stats->max_iterations_per_step = std::max(stats->max_iterations_per_step, it);
    }
  }
  return u;
}

}  // namespace mfg
