#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mfgpi/grid.hpp"
#include "mfgpi/models.hpp"

namespace mfg {

inline constexpr double kNotAvailable = std::numeric_limits<double>::quiet_NaN();

/// Scalar metrics of one outer iteration. Iterations count full passes from 1.
struct IterationRecord {
  int iteration = 0;
  double d_density = kNotAvailable;  // max |M(k) - M(k-1)|; NaN on the first PI pass
  double res_hjb = kNotAvailable;
  double res_fp = kNotAvailable;
  double gap_u = kNotAvailable;  // L-infinity gaps to a reference solution
  double gap_m = kNotAvailable;
  double gap_q = kNotAvailable;
  double seconds = 0.0;  // wall clock since the solve started
};

/// Wall clock spent per phase, in seconds.
struct PhaseTimings {
  double fp = 0.0;
  double hjb = 0.0;
  double policy = 0.0;
  double newton = 0.0;
  double diagnostics = 0.0;

  double solve_total() const { return fp + hjb + policy + newton; }
};

enum class SolveStatus { converged, diverged, max_iterations };

std::string to_string(SolveStatus status);

struct ConvergenceReport {
  std::vector<IterationRecord> history;
  SolveStatus status = SolveStatus::max_iterations;
  std::string message;
  double fitted_rate = kNotAvailable;
  double fit_r2 = kNotAvailable;
  PhaseTimings timings;
  int newton_iterations = 0;

  /// Optional per-iteration snapshots (see SolverConfig::keep_field_history).
  std::vector<TimeField> m_history;
  std::vector<TimeField> u_history;
  std::vector<PolicyTimeField> q_history;

  std::vector<double> density_differences() const;
};

struct MfgResiduals {
  double res_hjb = 0.0;
  double res_fp = 0.0;
};

/// Sup-norm residuals of the discrete MFG system: the nonlinear implicit HJB
/// step at every n with density M_{n+1}, and the implicit FP step with drift
/// H_p(M_{n+1}, D U_n). Both are per unit time.
MfgResiduals residual_mfg(const HamiltonianModel& model, const TimeField& u, const TimeField& m,
                          const SpaceGrid& grid, const TimeGrid& time, double epsilon);

double linf_gap(const TimeField& a, const TimeField& b);
double linf_gap(const PolicyTimeField& a, const PolicyTimeField& b);

struct RateFit {
  double rate = 1.0;
  double r2 = 1.0;
};

/// Least-squares fit of log d[k] against k over the inclusive index window
/// [first, last]; rate = exp(slope). A constant sequence gives rate 1, r2 1.
/// Throws std::invalid_argument on fewer than 3 points or non-positive values.
RateFit fit_linear_rate(std::span<const double> d, std::size_t first, std::size_t last);

/// Window used for the report: from `first_iteration` to the first iteration
/// whose density difference is at or below `floor`. Returns false when the
/// window holds fewer than 3 usable points.
bool rate_window(const ConvergenceReport& report, int first_iteration, double floor,
                 std::size_t& first, std::size_t& last);

}  // namespace mfg
