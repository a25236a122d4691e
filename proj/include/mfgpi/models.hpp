#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>

#include "mfgpi/grid.hpp"

namespace mfg {

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

/// Congestion Hamiltonian
///
///     H(m, p) = |p|^gamma / (gamma * w(m)^(gamma-1)) - zeta * m,
///     w(m)    = (c + a*m)^theta,
///
/// with Lagrangian L(m, q) = w(m) |q|^gamma' / gamma' + zeta * m, where
/// gamma' = gamma / (gamma - 1). When c == 0 the weight is evaluated at
/// max(m, m_floor).
///
/// The vector-valued entry points accept p of any length: the discrete scheme
/// evaluates them on the 2*dim Engquist-Osher components of a node.
class HamiltonianModel {
 public:
  struct Params {
    double gamma = 2.0;
    double weight_c = 1.0;
    double weight_a = 0.0;
    double weight_theta = 0.0;
    double coupling_zeta = 0.0;
    double m_floor = 1e-10;
  };

  /// Throws std::invalid_argument on gamma <= 1, negative weights or a weight
  /// that vanishes at the floor.
  explicit HamiltonianModel(const Params& params);
  HamiltonianModel() : HamiltonianModel(Params{}) {}

  const Params& params() const { return p_; }
  double gamma() const { return p_.gamma; }
  double conjugate_exponent() const { return p_.gamma / (p_.gamma - 1.0); }
  double zeta() const { return p_.coupling_zeta; }

  /// True when w does not depend on m (separable kinetic part).
  bool weight_is_constant() const { return p_.weight_a == 0.0 || p_.weight_theta == 0.0; }

  double weight(double m) const;

  double hamiltonian(double m, std::span<const double> p) const;
  void hamiltonian_grad_p(double m, std::span<const double> p, std::span<double> out) const;
  double lagrangian(double m, double q_norm_sq) const;
  /// H_p with every component clamped to [-R, R]; R may be kUnbounded.
  void optimal_policy(double m, std::span<const double> p, double bound,
                      std::span<double> out) const;

  /// |p|^gamma / (gamma w^(gamma-1)), from |p|^2. No domain check on m.
  double kinetic_from_norm_sq(double m, double p_norm_sq) const;
  /// |p|^(gamma-2) / w^(gamma-1), the factor with H_p = factor * p; 0 at p = 0.
  double grad_factor_from_norm_sq(double m, double p_norm_sq) const;
  /// w |q|^gamma' / gamma', from |q|^2. No domain check on m.
  double kinetic_lagrangian_from_norm_sq(double m, double q_norm_sq) const;

 private:
  double weight_unchecked(double m) const;
  Params p_;
};

enum class ScenarioName { example1, example2, example3 };

std::optional<ScenarioName> parse_scenario_name(const std::string& name);
std::string to_string(ScenarioName name);

/// Values a caller may change on top of a preset. beta is the congestion
/// exponent of H = |p|^gamma / (c + a m)^beta, so theta = beta / (gamma - 1).
struct ScenarioOverrides {
  std::optional<double> beta;
  std::optional<double> zeta;
  std::optional<double> horizon;
  std::optional<int> nodes;
  std::optional<int> steps;
  std::optional<double> epsilon;
};

struct ScenarioPreset {
  ScenarioName name = ScenarioName::example1;
  HamiltonianModel model;
  double beta = 0.0;
  double epsilon = 0.0;
  int dim = 1;
  int nodes = 0;
  int steps = 0;
  double horizon = 0.0;

  SpaceGrid space_grid() const { return SpaceGrid(dim, nodes); }
  TimeGrid time_grid() const { return TimeGrid(steps, horizon); }

  /// u_T sampled at the nodes.
  ScalarField terminal_cost(const SpaceGrid& grid) const;
  /// m_0 sampled at the nodes and scaled to unit total mass.
  ScalarField initial_density(const SpaceGrid& grid) const;
};

/// Presets:
///   example1  1D, H = |p|^2 / (2 (1+4m)^beta) - zeta m, eps 0.05,
///             beta 1.5, zeta 1, T 1, I = N = 200
///   example2  2D, H = |p|^2 / (2 m^(1/2)), eps 0.3, T 0.5, I = N = 50
///   example3  2D, H = |p|^3 / (3 m^(1/2)), otherwise as example2
/// Throws std::invalid_argument on non-positive overrides (zeta may be 0).
ScenarioPreset build_scenario(ScenarioName name, const ScenarioOverrides& overrides = {});

}  // namespace mfg
