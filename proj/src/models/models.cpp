#include "mfgpi/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mfg {
namespace {

void check_density(double m) {
  if (!(m >= 0.0)) throw std::domain_error("congestion model evaluated at negative density");
}

double norm_sq(std::span<const double> p) {
  double s = 0.0;
  for (double v : p) s += v * v;
  return s;
}

}  // namespace

HamiltonianModel::HamiltonianModel(const Params& params) : p_(params) {
  if (!(p_.gamma > 1.0)) throw std::invalid_argument("Hamiltonian growth gamma must exceed 1");
  if (!(p_.weight_c >= 0.0) || !(p_.weight_a >= 0.0) || !(p_.weight_theta >= 0.0))
    throw std::invalid_argument("congestion weight parameters must be non-negative");
  if (!(p_.coupling_zeta >= 0.0)) throw std::invalid_argument("coupling zeta must be non-negative");
  if (!(p_.m_floor > 0.0)) throw std::invalid_argument("density floor must be positive");
  if (p_.weight_theta > 0.0 && !(p_.weight_c + p_.weight_a * p_.m_floor > 0.0))
    throw std::invalid_argument("congestion weight vanishes identically");
}

double HamiltonianModel::weight_unchecked(double m) const {
  if (p_.weight_theta == 0.0) return 1.0;
  const double m_eff = p_.weight_c == 0.0 ? std::max(m, p_.m_floor) : m;
  const double base = p_.weight_c + p_.weight_a * m_eff;
  if (p_.weight_theta == 1.0) return base;
  if (p_.weight_theta == 0.5) return std::sqrt(base);
  return std::pow(base, p_.weight_theta);
}

double HamiltonianModel::weight(double m) const {
  check_density(m);
  return weight_unchecked(m);
}

double HamiltonianModel::kinetic_from_norm_sq(double m, double p_norm_sq) const {
  const double w = weight_unchecked(m);
  if (p_.gamma == 2.0) return p_norm_sq / (2.0 * w);
  return std::pow(p_norm_sq, 0.5 * p_.gamma) / (p_.gamma * std::pow(w, p_.gamma - 1.0));
}

double HamiltonianModel::grad_factor_from_norm_sq(double m, double p_norm_sq) const {
  const double w = weight_unchecked(m);
  if (p_.gamma == 2.0) return 1.0 / w;
  if (p_norm_sq == 0.0) return 0.0;  // limit of |p|^(gamma-2) p as p -> 0
  return std::pow(p_norm_sq, 0.5 * (p_.gamma - 2.0)) / std::pow(w, p_.gamma - 1.0);
}

double HamiltonianModel::kinetic_lagrangian_from_norm_sq(double m, double q_norm_sq) const {
  const double w = weight_unchecked(m);
  const double gp = conjugate_exponent();
  if (p_.gamma == 2.0) return 0.5 * w * q_norm_sq;
  return w * std::pow(q_norm_sq, 0.5 * gp) / gp;
}

double HamiltonianModel::hamiltonian(double m, std::span<const double> p) const {
  check_density(m);
  return kinetic_from_norm_sq(m, norm_sq(p)) - p_.coupling_zeta * m;
}

void HamiltonianModel::hamiltonian_grad_p(double m, std::span<const double> p,
                                          std::span<double> out) const {
  check_density(m);
  if (out.size() != p.size()) throw std::invalid_argument("hamiltonian_grad_p: size mismatch");
  const double f = grad_factor_from_norm_sq(m, norm_sq(p));
  for (std::size_t j = 0; j < p.size(); ++j) out[j] = f * p[j];
}

double HamiltonianModel::lagrangian(double m, double q_norm_sq) const {
  check_density(m);
  if (!(q_norm_sq >= 0.0)) throw std::domain_error("lagrangian: negative |q|^2");
  return kinetic_lagrangian_from_norm_sq(m, q_norm_sq) + p_.coupling_zeta * m;
}

void HamiltonianModel::optimal_policy(double m, std::span<const double> p, double bound,
                                      std::span<double> out) const {
  if (!(bound > 0.0)) throw std::invalid_argument("policy bound R must be positive");
  hamiltonian_grad_p(m, p, out);
  if (std::isinf(bound)) return;
  for (double& v : out) v = std::clamp(v, -bound, bound);
}

std::optional<ScenarioName> parse_scenario_name(const std::string& name) {
  if (name == "example1") return ScenarioName::example1;
  if (name == "example2") return ScenarioName::example2;
  if (name == "example3") return ScenarioName::example3;
  return std::nullopt;
}

std::string to_string(ScenarioName name) {
  switch (name) {
    case ScenarioName::example1:
      return "example1";
    case ScenarioName::example2:
      return "example2";
    case ScenarioName::example3:
      return "example3";
  }
  return "unknown";
}

namespace {

void require_positive(const std::optional<double>& v, const char* key) {
  if (v && !(*v > 0.0 && std::isfinite(*v)))
    throw std::invalid_argument(std::string("override '") + key + "' must be positive");
}

void require_positive(const std::optional<int>& v, const char* key) {
  if (v && *v <= 0) throw std::invalid_argument(std::string("override '") + key + "' must be positive");
}

}  // namespace

ScenarioPreset build_scenario(ScenarioName name, const ScenarioOverrides& o) {
  require_positive(o.beta, "beta");
  require_positive(o.horizon, "T");
  require_positive(o.nodes, "I");
  require_positive(o.steps, "N");
  require_positive(o.epsilon, "epsilon");
  if (o.zeta && !(*o.zeta >= 0.0 && std::isfinite(*o.zeta)))
    throw std::invalid_argument("override 'zeta' must be non-negative");

  ScenarioPreset s;
  s.name = name;
  HamiltonianModel::Params mp;
  switch (name) {
    case ScenarioName::example1:
      s.dim = 1;
      s.epsilon = 0.05;
      s.nodes = 200;
      s.steps = 200;
      s.horizon = 1.0;
      s.beta = 1.5;
      mp.gamma = 2.0;
      mp.weight_c = 1.0;
      mp.weight_a = 4.0;
      mp.coupling_zeta = 1.0;
      break;
    case ScenarioName::example2:
    case ScenarioName::example3:
      s.dim = 2;
      s.epsilon = 0.3;
      s.nodes = 50;
      s.steps = 50;
      s.horizon = 0.5;
      s.beta = 0.5;
      mp.gamma = name == ScenarioName::example2 ? 2.0 : 3.0;
      mp.weight_c = 0.0;
      mp.weight_a = 1.0;
      mp.coupling_zeta = 0.0;
      break;
  }
  if (o.beta) s.beta = *o.beta;
  if (o.zeta) mp.coupling_zeta = *o.zeta;
  if (o.horizon) s.horizon = *o.horizon;
  if (o.nodes) s.nodes = *o.nodes;
  if (o.steps) s.steps = *o.steps;
  if (o.epsilon) s.epsilon = *o.epsilon;
  mp.weight_theta = s.beta / (mp.gamma - 1.0);
  s.model = HamiltonianModel(mp);
  return s;
}

ScalarField ScenarioPreset::terminal_cost(const SpaceGrid& grid) const {
  ScalarField u(grid.size());
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double x = grid.coordinate(k, 0);
    if (name == ScenarioName::example1) {
      const double a = x - 0.3, b = x - 0.7;
      u[k] = 10.0 * std::min(a * a, b * b);
    } else {
      const double y = grid.coordinate(k, 1);
      u[k] = 1.2 * std::cos(kTwoPi * x) + std::cos(kTwoPi * y);
    }
  }
  return u;
}

ScalarField ScenarioPreset::initial_density(const SpaceGrid& grid) const {
  ScalarField m(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double x = grid.coordinate(k, 0);
    if (name == ScenarioName::example1) {
      m[k] = (x >= 0.375 && x <= 0.625) ? 4.0 : 0.0;
    } else {
      // Gaussian restricted to the fundamental cell [0,1)^2, not wrapped.
      const double y = grid.coordinate(k, 1);
      const double r2 = (x - 0.25) * (x - 0.25) + (y - 0.25) * (y - 0.25);
      m[k] = std::exp(-10.0 * r2);
    }
  }
  double total = 0.0;
  for (double v : m) total += v;
  const double cell = grid.dim() == 1 ? grid.spacing() : grid.spacing() * grid.spacing();
  const double scale = 1.0 / (cell * total);
  for (double& v : m) v *= scale;
  return m;
}

}  // namespace mfg
