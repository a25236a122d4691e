#pragma once

// Space-time sweeps of the discrete MFG system.
//
// Time staggering: the policy Q_n lives on [t_n, t_{n+1}) and is always paired
// with the density M_{n+1} and the value U_n. The forward sweep solves for
// M_{n+1} with drift Q_n; the backward sweeps solve for U_n using M_{n+1}.
//
// Policies passed in are raw (unsplit) staggered fields; the sweeps apply the
// Engquist-Osher split themselves.

#include <span>
#include <stdexcept>
#include <vector>

#include "mfgpi/grid.hpp"
#include "mfgpi/linsys.hpp"
#include "mfgpi/models.hpp"

namespace mfg {

class NewtonError : public std::runtime_error {
 public:
  NewtonError(const std::string& what, int time_index, double residual)
      : std::runtime_error(what), time_index_(time_index), residual_(residual) {}
  int time_index() const { return time_index_; }
  double residual() const { return residual_; }

 private:
  int time_index_;
  double residual_;
};

struct NewtonSettings {
  double tol = 1e-11;  // on the sup norm of the discrete HJB residual
  int max_iters = 50;
};

/// Per-sweep Newton bookkeeping.
struct NewtonStats {
  int total_iterations = 0;
  int max_iterations_per_step = 0;
  int damped_steps = 0;
  /// Residual sup-norms of every inner iterate, per time index n (size N).
  std::vector<std::vector<double>> residual_history;
};

/// Forward FP sweep. Slice 0 is m0; every later slice solves the implicit step
/// with drift Q_n. Throws LinearSolveError (message names the time index).
TimeField fp_forward(std::span<const double> m0, const PolicyTimeField& q, const SpaceGrid& grid,
                     const TimeGrid& time, double epsilon, LinearSolver& solver);
TimeField fp_forward(std::span<const double> m0, const PolicyTimeField& q, const SpaceGrid& grid,
                     const TimeGrid& time, double epsilon);

/// Backward sweep of the linear HJB equation with frozen policy:
///   U_n - dt (eps Lap U_n - Q±_n . D U_n) = U_{n+1} + dt S_n.
/// `source` holds N slices (slice n is S_n).
TimeField hjb_backward_linear(std::span<const double> u_terminal, const PolicyTimeField& q,
                              const TimeField& source, const SpaceGrid& grid, const TimeGrid& time,
                              double epsilon, LinearSolver& solver);
TimeField hjb_backward_linear(std::span<const double> u_terminal, const PolicyTimeField& q,
                              const TimeField& source, const SpaceGrid& grid, const TimeGrid& time,
                              double epsilon);

/// L(M_next, |Q±|^2) per node. Densities in [-1e-10, 0) are treated as 0;
/// anything more negative throws std::domain_error.
ScalarField lagrangian_source(const HamiltonianModel& model, std::span<const double> m_next,
                              const StaggeredPolicy& qpm);

/// Source of the "perturbed Lagrangian" variant: Q±.D U_prev - H(M_next, D U_prev),
/// with the discrete Hamiltonian of `discrete_hamiltonian`.
ScalarField perturbed_lagrangian_source(const HamiltonianModel& model, const SpaceGrid& grid,
                                        std::span<const double> m_next, const StaggeredPolicy& qpm,
                                        std::span<const double> u_prev);

/// Discrete policy at one time index: with P the EO-split one-sided gradient
/// of U (all 2*dim components), every raw component is scaled by
/// |P|^(gamma-2) / w(M_next)^(gamma-1) and clamped to [-R, R].
/// For gamma = 2 this is D U / w(M_next) exactly.
StaggeredPolicy policy_slice(const HamiltonianModel& model, const SpaceGrid& grid,
                             std::span<const double> u, std::span<const double> m_next,
                             double bound);

/// Q_n = policy_slice(U_n, M_{n+1}) for n = 0..N-1.
PolicyTimeField policy_update(const HamiltonianModel& model, const SpaceGrid& grid,
                              const TimeField& u, const TimeField& m, double bound);

/// |P|^gamma / (gamma w(M)^(gamma-1)) - zeta M per node, P the EO-split gradient.
ScalarField discrete_hamiltonian(const HamiltonianModel& model, const SpaceGrid& grid,
                                 std::span<const double> u, std::span<const double> m);

/// Residual of one nonlinear implicit HJB step:
///   F(U) = (U - U_next)/dt - eps Lap U + H_disc(M_next, D U).
ScalarField hjb_step_residual(const HamiltonianModel& model, const SpaceGrid& grid, double dt,
                              double epsilon, std::span<const double> u,
                              std::span<const double> u_next, std::span<const double> m_next);

/// dF/dU = I/dt - eps Lap + q±.D with q = H_p(M_next, P). Equal to the HJB
/// step matrix for q± divided by dt, hence an M-matrix.
SparseOperator newton_jacobian(const HamiltonianModel& model, std::span<const double> m_next,
                               std::span<const double> u, const SpaceGrid& grid,
                               const TimeGrid& time, double epsilon);

/// Backward sweep of the nonlinear HJB equation by Newton's method at each
/// time step. The initial guess for U_n is `warm_start` slice n when given,
/// otherwise U_{n+1}. A step that grows the residual tenfold is halved.
/// Throws NewtonError when a step fails to reach `settings.tol`.
TimeField hjb_backward_newton(const HamiltonianModel& model, std::span<const double> u_terminal,
                              const TimeField& m, const SpaceGrid& grid, const TimeGrid& time,
                              double epsilon, const NewtonSettings& settings, LinearSolver& solver,
                              const TimeField* warm_start = nullptr, NewtonStats* stats = nullptr);

}  // namespace mfg
