#include <doctest.h>

#include <cmath>
#include <random>

#include "mfgpi/models.hpp"
#include "mfgpi/operators.hpp"
#include "support/oracles.hpp"

using namespace mfg;

namespace {

HamiltonianModel model_of(ScenarioName name, ScenarioOverrides o = {}) {
  return build_scenario(name, o).model;
}

std::vector<HamiltonianModel> sample_models() {
  return {model_of(ScenarioName::example1), model_of(ScenarioName::example1, {.beta = 0.8, .zeta = 0.2}),
          model_of(ScenarioName::example2), model_of(ScenarioName::example3),
          HamiltonianModel({.gamma = 1.5, .weight_c = 1.0, .weight_a = 2.0, .weight_theta = 0.7,
                            .coupling_zeta = 0.3})};
}

double h_of(const HamiltonianModel& model, double m, std::vector<double> p) { return model.hamiltonian(m, p); }

}  // namespace

TEST_CASE("hamiltonian examples") {
  const auto e1 = model_of(ScenarioName::example1);
  CHECK(h_of(e1, 0.0, {2.0}) == doctest::Approx(2.0));
  const auto e2 = model_of(ScenarioName::example2);
  CHECK(h_of(e2, 1.0, {2.0, 0.0}) == doctest::Approx(2.0));
  const auto e3 = model_of(ScenarioName::example3);
  CHECK(h_of(e3, 4.0, {2.0, 0.0}) == doctest::Approx(4.0 / 3.0));
  CHECK_THROWS_AS(h_of(e1, -0.1, {1.0}), std::domain_error);
}

TEST_CASE("hamiltonian gradient examples") {
  std::vector<double> out(1);
  const auto e1 = model_of(ScenarioName::example1);
  e1.hamiltonian_grad_p(3.0, std::vector<double>{0.0}, out);
  CHECK(out[0] == 0.0);

  const auto e3 = model_of(ScenarioName::example3);
  std::vector<double> out2(2);
  e3.hamiltonian_grad_p(4.0, std::vector<double>{2.0, 0.0}, out2);
  CHECK(out2[0] == doctest::Approx(2.0));
  CHECK(out2[1] == 0.0);
  e3.hamiltonian_grad_p(4.0, std::vector<double>{0.0, 0.0}, out2);
  CHECK(out2[0] == 0.0);
  CHECK_THROWS_AS(e3.hamiltonian_grad_p(-1.0, std::vector<double>{1.0, 0.0}, out2), std::domain_error);
}

TEST_CASE("lagrangian examples") {
  const auto e1 = model_of(ScenarioName::example1);
  CHECK(e1.lagrangian(0.0, 4.0) == doctest::Approx(2.0));
  const auto e3 = model_of(ScenarioName::example3);
  CHECK(e3.lagrangian(1.0, 4.0) == doctest::Approx(2.0 / 3.0 * std::pow(2.0, 1.5)));
  CHECK(e3.lagrangian(1.0, 4.0) == doctest::Approx(1.8856).epsilon(1e-4));
  CHECK_THROWS_AS(e1.lagrangian(-1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(e1.lagrangian(1.0, -1.0), std::domain_error);
}

TEST_CASE("optimal policy clamps") {
  const auto e1 = model_of(ScenarioName::example1);
  std::vector<double> out(1);
  e1.optimal_policy(0.0, std::vector<double>{3.0}, 2.0, out);
  CHECK(out[0] == 2.0);
  e1.optimal_policy(0.0, std::vector<double>{-3.0}, 2.0, out);
  CHECK(out[0] == -2.0);
  CHECK_THROWS_AS(e1.optimal_policy(0.0, std::vector<double>{1.0}, 0.0, out), std::invalid_argument);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> pd(-10.0, 10.0), md(0.0, 5.0), rd(0.1, 4.0);
  for (const auto& model : sample_models()) {
    for (int s = 0; s < 200; ++s) {
      const double m = md(rng);
      const std::vector<double> p{pd(rng), pd(rng)};
      std::vector<double> hp(2), q(2), unbounded(2);
      model.hamiltonian_grad_p(m, p, hp);
      const double r = rd(rng);
      model.optimal_policy(m, p, r, q);
      model.optimal_policy(m, p, kUnbounded, unbounded);
      for (int j = 0; j < 2; ++j) {
        CHECK(std::fabs(q[j]) <= std::min(std::fabs(hp[j]), r));
        CHECK(unbounded[j] == hp[j]);
      }
    }
  }
}

TEST_CASE("hamiltonian is convex in p") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pd(-10.0, 10.0), md(0.0, 10.0);
  for (const auto& model : sample_models()) {
    for (int s = 0; s < 500; ++s) {
      const double m = md(rng);
      const std::vector<double> a{pd(rng), pd(rng)}, b{pd(rng), pd(rng)};
      const std::vector<double> mid{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
      const double lhs = model.hamiltonian(m, mid);
      const double rhs = 0.5 * (model.hamiltonian(m, a) + model.hamiltonian(m, b));
      CHECK(lhs <= rhs + 1e-12 * std::max(1.0, std::fabs(rhs)));
    }
  }
}

TEST_CASE("gradient matches central differences of H") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> md(0.1, 10.0), dir(-1.0, 1.0), rad(0.5, 10.0);
  const double delta = 1e-5;
  for (const auto& model : sample_models()) {
    for (int s = 0; s < 1000; ++s) {
      const double m = md(rng);
      std::vector<double> p{dir(rng), dir(rng)};
      const double scale = rad(rng) / std::hypot(p[0], p[1]);
      p[0] *= scale;
      p[1] *= scale;
      std::vector<double> g(2);
      model.hamiltonian_grad_p(m, p, g);
      const double gnorm = std::hypot(g[0], g[1]);
      for (int j = 0; j < 2; ++j) {
        auto pp = p, pm = p;
        pp[j] += delta;
        pm[j] -= delta;
        const double fd = (model.hamiltonian(m, pp) - model.hamiltonian(m, pm)) / (2.0 * delta);
        CHECK(std::fabs(fd - g[j]) <= 1e-6 * gnorm);
      }
    }
  }
}

TEST_CASE("Fenchel equality at the unclamped maximiser") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> md(0.1, 10.0), pd(-10.0, 10.0);
  for (const auto& model : sample_models()) {
    for (int s = 0; s < 1000; ++s) {
      const double m = md(rng);
      const std::vector<double> p{pd(rng), pd(rng)};
      std::vector<double> q(2);
      model.optimal_policy(m, p, kUnbounded, q);
      const double pq = p[0] * q[0] + p[1] * q[1];
      const double lhs = pq - model.lagrangian(m, q[0] * q[0] + q[1] * q[1]);
      const double rhs = model.hamiltonian(m, p);
      CHECK(std::fabs(lhs - rhs) <= 1e-10 * std::max(1.0, std::fabs(pq)));
    }
  }
}

TEST_CASE("kinetic parts are Legendre duals (lattice maximisation)") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> md(0.2, 3.0), pd(-2.0, 2.0);
  for (const auto& model : sample_models()) {
    for (int s = 0; s < 6; ++s) {
      const double m = md(rng);
      const std::vector<double> p1{pd(rng)};
      const double kinetic = model.hamiltonian(m, p1) + model.zeta() * m;
      const double lattice = oracle::legendre_lattice(model.weight(m), model.gamma(), p1, -5.0, 5.0, 1e-3);
      CHECK(std::fabs(lattice - kinetic) <= 1e-4);
    }
    const double m = md(rng);
    const std::vector<double> p2{pd(rng), pd(rng)};
    const double kinetic = model.hamiltonian(m, p2) + model.zeta() * m;
    const double lattice = oracle::legendre_lattice(model.weight(m), model.gamma(), p2, -5.0, 5.0, 4e-3);
    CHECK(std::fabs(lattice - kinetic) <= 1e-4);
  }
}

TEST_CASE("singular weight uses the density floor") {
  const auto e2 = model_of(ScenarioName::example2);
  CHECK(e2.weight(0.0) == doctest::Approx(std::sqrt(1e-10)));
  CHECK(std::isfinite(h_of(e2, 0.0, {1.0, 1.0})));
  CHECK(e2.weight(4.0) == doctest::Approx(2.0));
}

TEST_CASE("model parameter validation") {
  CHECK_THROWS_AS(HamiltonianModel({.gamma = 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(HamiltonianModel({.gamma = 2.0, .weight_c = -1.0}), std::invalid_argument);
  CHECK_THROWS_AS(HamiltonianModel({.gamma = 2.0, .coupling_zeta = -1.0}), std::invalid_argument);
  CHECK(HamiltonianModel().weight_is_constant());
}

TEST_CASE("scenario presets") {
  const auto e1 = build_scenario(ScenarioName::example1);
  CHECK(e1.beta == 1.5);
  CHECK(e1.model.zeta() == 1.0);
  CHECK(e1.horizon == 1.0);
  CHECK(e1.nodes == 200);
  CHECK(e1.steps == 200);
  CHECK(e1.epsilon == 0.05);
  CHECK(e1.dim == 1);
  CHECK(e1.model.params().weight_a == 4.0);
  CHECK(e1.model.params().weight_theta == 1.5);

  const auto e2 = build_scenario(ScenarioName::example2);
  CHECK(e2.epsilon == 0.3);
  CHECK(e2.horizon == 0.5);
  CHECK(e2.nodes == 50);
  CHECK(e2.steps == 50);
  CHECK(e2.model.params().weight_theta == 0.5);

  const auto e3 = build_scenario(ScenarioName::example3);
  CHECK(e3.model.gamma() == 3.0);
  CHECK(e3.model.params().weight_theta == 0.25);

  const auto longer = build_scenario(ScenarioName::example1, {.horizon = 2.0});
  CHECK(longer.horizon == 2.0);
  CHECK(longer.beta == 1.5);
  CHECK(longer.nodes == 200);

  CHECK_THROWS_AS(build_scenario(ScenarioName::example1, {.beta = -1.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_scenario(ScenarioName::example1, {.nodes = 0}), std::invalid_argument);
  CHECK_THROWS_AS(build_scenario(ScenarioName::example1, {.horizon = 0.0}), std::invalid_argument);
  CHECK_NOTHROW(build_scenario(ScenarioName::example1, {.zeta = 0.0}));

  CHECK(parse_scenario_name("example3") == ScenarioName::example3);
  CHECK_FALSE(parse_scenario_name("example4"));
  CHECK(to_string(ScenarioName::example2) == "example2");
}

TEST_CASE("initial densities have unit mass and terminal costs match their formulas") {
  for (ScenarioName name : {ScenarioName::example1, ScenarioName::example2, ScenarioName::example3}) {
    const auto s = build_scenario(name);
    const SpaceGrid g = s.space_grid();
    const ScalarField m0 = s.initial_density(g);
    CHECK(std::fabs(total_mass(g, m0) - 1.0) <= 1e-12);
    for (double v : m0) CHECK(v >= 0.0);
  }
  const auto e1 = build_scenario(ScenarioName::example1);
  const SpaceGrid g1 = e1.space_grid();
  const ScalarField u1 = e1.terminal_cost(g1);
  CHECK(u1[60] == doctest::Approx(0.0));   // x = 0.3
  CHECK(u1[100] == doctest::Approx(0.4));  // x = 0.5
  const ScalarField m1 = e1.initial_density(g1);
  CHECK(m1[100] > 0.0);
  CHECK(m1[10] == 0.0);

  const auto e2 = build_scenario(ScenarioName::example2);
  const SpaceGrid g2 = e2.space_grid();
  const ScalarField u2 = e2.terminal_cost(g2);
  CHECK(u2[0] == doctest::Approx(2.2));
  const ScalarField m2 = e2.initial_density(g2);
  CHECK(*std::max_element(m2.begin(), m2.end()) == m2[g2.index(12, 12)]);
}
