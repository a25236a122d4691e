#pragma once

#include <optional>
#include <string>

#include "mfgpi/diagnostics.hpp"
#include "mfgpi/kernels.hpp"
#include "mfgpi/linsys.hpp"
#include "mfgpi/models.hpp"

namespace mfg {

enum class Algorithm { pi1, pi2, fixed_point };

std::optional<Algorithm> parse_algorithm(const std::string& name);
std::string to_string(Algorithm algorithm);

/// HJB source used by policy iteration 1. `lagrangian` is L(M_{n+1}, Q±_n);
/// `perturbed` is Q±_n.D U_prev - H(M_{n+1}, D U_prev) with U_prev the value
/// of the previous pass (L on the first pass).
enum class Pi1Source { lagrangian, perturbed };

struct Solution;

struct SolverConfig {
  ScenarioPreset scenario;
  Algorithm algorithm = Algorithm::pi1;
  double tol_density = 1e-8;
  int max_outer_iters = 500;
  double bound = kUnbounded;  // R
  /// Empty means Q(0) = 0.
  PolicyTimeField initial_policy;
  NewtonSettings newton;
  LinearSolveSettings linear;
  double blowup_threshold = 1e8;
  Pi1Source pi1_source = Pi1Source::lagrangian;
  bool record_residuals = true;
  bool keep_field_history = false;
  /// When set, every iteration records L-infinity gaps to this solution.
  const Solution* reference = nullptr;
};

struct Solution {
  TimeField u;
  TimeField m;
  PolicyTimeField q;
  bool converged = false;
  int iterations = 0;
};

struct SolveResult {
  Solution solution;
  ConvergenceReport report;
};

/// Throws std::invalid_argument on an invalid configuration. Kernel failures
/// (LinearSolveError, NewtonError, std::domain_error) propagate.
SolveResult pi1_solve(const SolverConfig& config);
SolveResult pi2_solve(const SolverConfig& config);
SolveResult fixed_point_solve(const SolverConfig& config);

/// Dispatches on config.algorithm.
SolveResult run_solver(const SolverConfig& config);

}  // namespace mfg
