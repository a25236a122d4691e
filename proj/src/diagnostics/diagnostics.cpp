#include "mfgpi/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mfgpi/kernels.hpp"
#include "mfgpi/operators.hpp"

namespace mfg {

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged:
      return "converged";
    case SolveStatus::diverged:
      return "diverged";
    case SolveStatus::max_iterations:
      return "max_iterations";
  }
  return "unknown";
}

std::vector<double> ConvergenceReport::density_differences() const {
  std::vector<double> d;
  d.reserve(history.size());
  for (const auto& r : history) d.push_back(r.d_density);
  return d;
}

MfgResiduals residual_mfg(const HamiltonianModel& model, const TimeField& u, const TimeField& m,
                          const SpaceGrid& grid, const TimeGrid& time, double epsilon) {
  const std::size_t slices = static_cast<std::size_t>(time.steps()) + 1;
  if (!u.same_shape(m) || u.slice_count() != slices || u.node_count() != grid.size())
    throw std::invalid_argument("residual_mfg: U and M must be full space-time fields on the grids");
  const double dt = time.dt();
  MfgResiduals res;
  for (std::size_t n = 0; n + 1 < slices; ++n) {
    const auto m_next = m.slice(n + 1);
    const ScalarField f = hjb_step_residual(model, grid, dt, epsilon, u.slice(n), u.slice(n + 1), m_next);
    for (double v : f) res.res_hjb = std::max(res.res_hjb, std::fabs(v));

    const StaggeredPolicy qpm = eo_split(policy_slice(model, grid, u.slice(n), m_next, kUnbounded));
    const ScalarField lap = laplacian_apply(grid, m_next);
    const ScalarField div = divergence(grid, m_next, qpm);
    const auto m_prev = m.slice(n);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double r = (m_next[k] - m_prev[k]) / dt - epsilon * lap[k] - div[k];
      res.res_fp = std::max(res.res_fp, std::fabs(r));
    }
  }
  for (double v : u.values())
    if (!std::isfinite(v)) res.res_hjb = kNotAvailable;
  for (double v : m.values())
    if (!std::isfinite(v)) res.res_fp = kNotAvailable;
  return res;
}

double linf_gap(const TimeField& a, const TimeField& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("linf_gap: fields differ in shape");
  return max_abs_diff(a.values(), b.values());
}

double linf_gap(const PolicyTimeField& a, const PolicyTimeField& b) {
  if (a.size() != b.size()) throw std::invalid_argument("linf_gap: policies differ in length");
  double gap = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    if (!a[n].same_shape(b[n])) throw std::invalid_argument("linf_gap: policy slices differ in shape");
    const double g = max_abs_diff(a[n].values(), b[n].values());
    if (!(g <= gap)) gap = g;
  }
  return gap;
}

RateFit fit_linear_rate(std::span<const double> d, std::size_t first, std::size_t last) {
  if (last >= d.size() || first > last || last - first + 1 < 3)
    throw std::invalid_argument("fit_linear_rate: window must hold at least 3 points");
  const std::size_t count = last - first + 1;
  double mean_x = 0.0, mean_y = 0.0;
  std::vector<double> y(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double v = d[first + i];
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument("fit_linear_rate: entries must be positive and finite");
    y[i] = std::log(v);
    mean_x += static_cast<double>(i);
    mean_y += y[i];
  }
  mean_x /= static_cast<double>(count);
  mean_y /= static_cast<double>(count);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double dx = static_cast<double>(i) - mean_x;
    const double dy = y[i] - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  const double slope = sxy / sxx;
  RateFit fit;
  fit.rate = std::exp(slope);
  if (syy == 0.0) {
    fit.r2 = 1.0;
  } else {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      const double e = y[i] - (mean_y + slope * (static_cast<double>(i) - mean_x));
      ss_res += e * e;
    }
    fit.r2 = 1.0 - ss_res / syy;
  }
  return fit;
}

bool rate_window(const ConvergenceReport& report, int first_iteration, double floor,
                 std::size_t& first, std::size_t& last) {
  const auto& h = report.history;
  std::size_t i = 0;
  while (i < h.size() && (h[i].iteration < first_iteration || !(h[i].d_density > 0.0))) ++i;
  if (i == h.size()) return false;
  first = i;
  last = first;
  while (last + 1 < h.size() && h[last].d_density > floor && h[last + 1].d_density > 0.0) ++last;
  return last >= first + 2;
}

}  // namespace mfg
