#include <doctest.h>

#include <cmath>
#include <random>

#include "mfgpi/linsys.hpp"
#include "mfgpi/operators.hpp"
#include "support/oracles.hpp"

using namespace mfg;

namespace {

struct Case {
  int dim;
  int nodes;
};

const Case kCases[] = {{1, 8}, {1, 16}, {2, 4}, {2, 8}};

double max_entry_diff(const std::vector<std::vector<double>>& a, const oracle::Dense& b) {
  double m = 0.0;
  for (std::size_t r = 0; r < a.size(); ++r)
    for (std::size_t c = 0; c < a.size(); ++c) m = std::max(m, std::fabs(a[r][c] - b[r][c]));
  return m;
}

SparseOperator from_dense(const oracle::Dense& a) {
  std::vector<Eigen::Triplet<double>> t;
  for (std::size_t r = 0; r < a.size(); ++r)
    for (std::size_t c = 0; c < a.size(); ++c)
      if (a[r][c] != 0.0) t.emplace_back(static_cast<int>(r), static_cast<int>(c), a[r][c]);
  SparseOperator::Matrix m(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(a.size()));
  m.setFromTriplets(t.begin(), t.end());
  return SparseOperator(std::move(m));
}

}  // namespace

TEST_CASE("zero drift gives the pure diffusion step") {
  for (const Case c : kCases) {
    const SpaceGrid g(c.dim, c.nodes);
    const oracle::Lattice lat{c.dim, c.nodes};
    const StaggeredPolicy zero(c.dim, g.size());
    const double dt = 0.01, eps = 0.3;
    const oracle::Dense expect = oracle::axpy(oracle::identity(g.size()), -dt * eps, oracle::laplacian(lat));
    CHECK(max_entry_diff(assemble_fp_matrix(g, dt, eps, zero).to_dense(), expect) <= 1e-13);
    CHECK(max_entry_diff(assemble_hjb_matrix(g, dt, eps, zero).to_dense(), expect) <= 1e-13);
  }
}

TEST_CASE("FP column sums and HJB row sums are one") {
  std::mt19937_64 rng(21);
  for (const Case c : kCases) {
    const SpaceGrid g(c.dim, c.nodes);
    for (int trial = 0; trial < 5; ++trial) {
      const StaggeredPolicy q = oracle::random_split_policy(rng, c.dim, g.size(), 5.0);
      const auto fp = assemble_fp_matrix(g, 0.005, 0.05, q);
      const auto hjb = assemble_hjb_matrix(g, 0.005, 0.05, q);
      for (double s : fp.column_sums()) CHECK(std::fabs(s - 1.0) <= 1e-13);
      for (double s : hjb.row_sums()) CHECK(std::fabs(s - 1.0) <= 1e-13);
    }
  }
}

TEST_CASE("HJB matrix is an M-matrix matching the dense advection oracle") {
  std::mt19937_64 rng(22);
  for (const Case c : kCases) {
    const SpaceGrid g(c.dim, c.nodes);
    const oracle::Lattice lat{c.dim, c.nodes};
    const StaggeredPolicy q = oracle::random_split_policy(rng, c.dim, g.size(), 5.0);
    const double dt = 0.02, eps = 0.05;
    const auto hjb = assemble_hjb_matrix(g, dt, eps, q).to_dense();
    oracle::Dense expect = oracle::axpy(oracle::identity(g.size()), -dt * eps, oracle::laplacian(lat));
    expect = oracle::axpy(expect, dt, oracle::advection(lat, oracle::lefts(q), oracle::rights(q)));
    CHECK(max_entry_diff(hjb, expect) <= 1e-13 * oracle::norm_inf(expect));
    for (std::size_t r = 0; r < hjb.size(); ++r) {
      CHECK(hjb[r][r] > 0.0);
      for (std::size_t col = 0; col < hjb.size(); ++col)
        if (col != r) CHECK(hjb[r][col] <= 0.0);
    }
  }
}

TEST_CASE("FP matrix equals the transpose of the HJB matrix and the operator path") {
  std::mt19937_64 rng(23);
  for (const Case c : kCases) {
    const SpaceGrid g(c.dim, c.nodes);
    const oracle::Lattice lat{c.dim, c.nodes};
    const StaggeredPolicy q = oracle::random_split_policy(rng, c.dim, g.size(), 5.0);
    const double dt = 0.02, eps = 0.05;
    const auto fp = assemble_fp_matrix(g, dt, eps, q);
    const auto hjb = assemble_hjb_matrix(g, dt, eps, q);
    CHECK(max_entry_diff(fp.to_dense(), oracle::transpose(hjb.to_dense())) == 0.0);

    // Dense brute force: I - dt (eps Lap + Div) with the divergence written out.
    oracle::Dense expect = oracle::axpy(oracle::identity(g.size()), -dt * eps, oracle::laplacian(lat));
    expect = oracle::axpy(expect, -dt, oracle::divergence(lat, oracle::lefts(q), oracle::rights(q)));
    CHECK(max_entry_diff(fp.to_dense(), expect) <= 1e-13 * oracle::norm_inf(expect));

    const auto m = oracle::random_vector(rng, g.size(), 0.0, 3.0);
    const ScalarField lap = laplacian_apply(g, m);
    const ScalarField div = divergence(g, m, q);
    ScalarField path(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) path[k] = m[k] - dt * (eps * lap[k] + div[k]);
    CHECK(oracle::max_diff(fp.apply(m), path) <= 1e-13 * oracle::norm_inf(expect) * oracle::norm_inf(m));
  }
}

TEST_CASE("solve: identity and diffusion of constants") {
  const SpaceGrid g(1, 16);
  const StaggeredPolicy zero(1, g.size());
  const ScalarField b{1, -2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16};
  const auto a = assemble_hjb_matrix(g, 0.0, 0.0, zero);
  CHECK(oracle::max_diff(solve(a, b), b) <= 1e-15);
  const auto d = assemble_fp_matrix(g, 0.1, 0.5, zero);
  for (double v : solve(d, ScalarField(16, 1.0))) CHECK(std::fabs(v - 1.0) <= 1e-13);
}

TEST_CASE("solve: random diagonally dominant systems against dense elimination") {
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t n = 16;
    oracle::Dense a = oracle::zeros(n);
    for (std::size_t r = 0; r < n; ++r) {
      double off = 0.0;
      for (std::size_t c = 0; c < n; ++c) {
        if (c == r || u(rng) < 0.4) continue;
        a[r][c] = u(rng);
        off += std::fabs(a[r][c]);
      }
      a[r][r] = off + 1.0 + std::fabs(u(rng));
    }
    const auto b = oracle::random_vector(rng, n, -5.0, 5.0);
    const auto expect = oracle::gauss_solve(a, b);
    const auto op = from_dense(a);
    CHECK(oracle::max_diff(solve(op, b), expect) <= 1e-10);
    LinearSolveSettings krylov;
    krylov.method = LinearSolveSettings::Method::krylov;
    CHECK(oracle::max_diff(solve(op, b, krylov), expect) <= 1e-10);
  }
}

TEST_CASE("solver reuse across matrices with the same pattern") {
  std::mt19937_64 rng(25);
  const SpaceGrid g(2, 6);
  LinearSolver solver;
  for (int trial = 0; trial < 4; ++trial) {
    const StaggeredPolicy q = oracle::random_split_policy(rng, 2, g.size(), 3.0);
    const auto a = assemble_fp_matrix(g, 0.05, 0.2, q);
    const auto b = oracle::random_vector(rng, g.size(), 0.0, 1.0);
    const auto x = solver.solve(a, b);
    CHECK(oracle::max_diff(x, oracle::gauss_solve(a.to_dense(), b)) <= 1e-12);
  }
}

TEST_CASE("solve errors") {
  oracle::Dense singular = oracle::zeros(3);
  singular[0][0] = 1.0;
  singular[1][1] = 1.0;
  CHECK_THROWS_AS(solve(from_dense(singular), ScalarField{1, 1, 1}), LinearSolveError);
  CHECK_THROWS_AS(solve(from_dense(oracle::identity(3)), ScalarField{1, 1}), std::invalid_argument);

  // A skew, poorly conditioned system that BiCGSTAB cannot finish in one step.
  const std::size_t n = 40;
  oracle::Dense hard = oracle::zeros(n);
  for (std::size_t r = 0; r < n; ++r) {
    hard[r][r] = 1.0;
    hard[r][(r + 1) % n] = -0.999;
    hard[r][(r + 7) % n] = 0.5 * ((r % 3) - 1.0);
  }
  LinearSolveSettings s;
  s.method = LinearSolveSettings::Method::krylov;
  s.max_krylov_iters = 1;
  s.rel_tol = 1e-15;
  try {
    solve(from_dense(hard), ScalarField(n, 1.0), s);
    FAIL("expected a Krylov failure");
  } catch (const LinearSolveError& e) {
    CHECK(e.achieved_residual() > 0.0);
  }
}

TEST_CASE("FP step keeps mass and positivity") {
  std::mt19937_64 rng(26);
  for (const Case c : kCases) {
    const SpaceGrid g(c.dim, c.nodes);
    for (int trial = 0; trial < 5; ++trial) {
      const StaggeredPolicy q = oracle::random_split_policy(rng, c.dim, g.size(), 20.0);
      const auto m = oracle::random_vector(rng, g.size(), 0.0, 4.0);
      const auto next = solve(assemble_fp_matrix(g, 0.05, 0.01, q), m);
      CHECK(std::fabs(total_mass(g, next) - total_mass(g, m)) <= 1e-11);
      for (double v : next) CHECK(v >= -1e-12 * oracle::norm_inf(m));
    }
  }
}

TEST_CASE("HJB step: constants are solutions and the step is monotone") {
  std::mt19937_64 rng(27);
  const SpaceGrid g(1, 16);
  for (int trial = 0; trial < 20; ++trial) {
    const StaggeredPolicy q = oracle::random_split_policy(rng, 1, g.size(), 10.0);
    const auto a = assemble_hjb_matrix(g, 0.05, 0.05, q);
    for (double v : solve(a, ScalarField(16, -2.5))) CHECK(std::fabs(v + 2.5) <= 1e-12);

    const auto b1 = oracle::random_vector(rng, g.size(), -1.0, 1.0);
    auto b2 = b1;
    const auto bump = oracle::random_vector(rng, g.size(), 0.0, 1.0);
    for (std::size_t k = 0; k < b2.size(); ++k) b2[k] += bump[k];
    const auto x1 = solve(a, b1), x2 = solve(a, b2);
    for (std::size_t k = 0; k < x1.size(); ++k) CHECK(x1[k] <= x2[k] + 1e-12);
  }
}
