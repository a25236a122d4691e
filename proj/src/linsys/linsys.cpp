#include "mfgpi/linsys.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

namespace mfg {
namespace {

using Triplet = Eigen::Triplet<double>;

void require_shapes(const SpaceGrid& grid, const StaggeredPolicy& qpm) {
  if (qpm.dim() != grid.dim() || qpm.node_count() != grid.size())
    throw std::invalid_argument("policy shape does not match grid");
}

// Builds the HJB-step matrix I - dt*eps*Lap + dt*Adv(Q±), or its transpose.
// Structural zeros are stored; all matrices on a grid share one pattern.
SparseOperator assemble_step(const SpaceGrid& grid, double dt, double epsilon,
                             const StaggeredPolicy& qpm, bool transpose) {
  require_shapes(grid, qpm);
  const int n = grid.nodes_per_dim();
  const std::size_t size = grid.size();
  const double inv_h = grid.inv_spacing();
  const double diff = dt * epsilon * inv_h * inv_h;

  std::vector<Triplet> entries;
  entries.reserve(size * (1 + 2 * static_cast<std::size_t>(grid.dim())));
  auto put = [&](std::size_t row, std::size_t col, double v) {
    if (transpose) std::swap(row, col);
    entries.emplace_back(static_cast<int>(row), static_cast<int>(col), v);
  };

  for (std::size_t k = 0; k < size; ++k) {
    const int i = static_cast<int>(k % static_cast<std::size_t>(n));
    const int j = static_cast<int>(k / static_cast<std::size_t>(n));
    double diag = 1.0;
    for (int d = 0; d < grid.dim(); ++d) {
      const double ql = qpm.left(d)[k];
      const double qr = qpm.right(d)[k];
      std::size_t lo, hi;
      if (d == 0) {
        lo = grid.index(wrap_index(i - 1, n), j);
        hi = grid.index(wrap_index(i + 1, n), j);
      } else {
        lo = grid.index(i, wrap_index(j - 1, n));
        hi = grid.index(i, wrap_index(j + 1, n));
      }
      diag += 2.0 * diff + dt * (ql - qr) * inv_h;
      put(k, lo, -diff - dt * ql * inv_h);
      put(k, hi, -diff + dt * qr * inv_h);
    }
    put(k, k, diag);
  }
  SparseOperator::Matrix m(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
  m.setFromTriplets(entries.begin(), entries.end());
  m.makeCompressed();
  return SparseOperator(std::move(m));
}

}  // namespace

ScalarField SparseOperator::apply(std::span<const double> x) const {
  if (x.size() != size()) throw std::invalid_argument("SparseOperator::apply: size mismatch");
  Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  Eigen::VectorXd y = m_ * xv;
  return ScalarField(y.data(), y.data() + y.size());
}

ScalarField SparseOperator::row_sums() const {
  ScalarField out(size(), 0.0);
  for (Eigen::Index c = 0; c < m_.outerSize(); ++c)
    for (Matrix::InnerIterator it(m_, c); it; ++it) out[static_cast<std::size_t>(it.row())] += it.value();
  return out;
}

ScalarField SparseOperator::column_sums() const {
  ScalarField out(size(), 0.0);
  for (Eigen::Index c = 0; c < m_.outerSize(); ++c)
    for (Matrix::InnerIterator it(m_, c); it; ++it) out[static_cast<std::size_t>(c)] += it.value();
  return out;
}

std::vector<std::vector<double>> SparseOperator::to_dense() const {
  std::vector<std::vector<double>> d(size(), std::vector<double>(size(), 0.0));
  for (Eigen::Index c = 0; c < m_.outerSize(); ++c)
    for (Matrix::InnerIterator it(m_, c); it; ++it)
      d[static_cast<std::size_t>(it.row())][static_cast<std::size_t>(c)] += it.value();
  return d;
}

SparseOperator assemble_fp_matrix(const SpaceGrid& grid, double dt, double epsilon,
                                  const StaggeredPolicy& qpm) {
  return assemble_step(grid, dt, epsilon, qpm, /*transpose=*/true);
}

SparseOperator assemble_hjb_matrix(const SpaceGrid& grid, double dt, double epsilon,
                                   const StaggeredPolicy& qpm) {
  return assemble_step(grid, dt, epsilon, qpm, /*transpose=*/false);
}

struct LinearSolver::Impl {
  using Matrix = SparseOperator::Matrix;
  Eigen::SparseLU<Matrix, Eigen::COLAMDOrdering<int>> lu;
  std::vector<Matrix::StorageIndex> outer, inner;
  bool analyzed = false;

  bool same_pattern(const Matrix& m) const {
    if (!analyzed || m.nonZeros() != static_cast<Eigen::Index>(inner.size()) ||
        m.outerSize() + 1 != static_cast<Eigen::Index>(outer.size()))
      return false;
    return std::memcmp(m.outerIndexPtr(), outer.data(), outer.size() * sizeof(outer[0])) == 0 &&
           std::memcmp(m.innerIndexPtr(), inner.data(), inner.size() * sizeof(inner[0])) == 0;
  }

  void remember_pattern(const Matrix& m) {
    outer.assign(m.outerIndexPtr(), m.outerIndexPtr() + m.outerSize() + 1);
    inner.assign(m.innerIndexPtr(), m.innerIndexPtr() + m.nonZeros());
    analyzed = true;
  }
};

LinearSolver::LinearSolver(LinearSolveSettings settings)
    : settings_(settings), impl_(std::make_unique<Impl>()) {
  if (!(settings_.rel_tol > 0.0)) throw std::invalid_argument("linear solver rel_tol must be positive");
  if (settings_.max_krylov_iters < 1)
    throw std::invalid_argument("linear solver max_krylov_iters must be >= 1");
}

LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

void LinearSolver::solve(const SparseOperator& a, std::span<const double> b, std::span<double> x) {
  if (b.size() != a.size() || x.size() != a.size())
    throw std::invalid_argument("linear solve: right-hand side does not match matrix size");
  const auto& m = a.matrix();
  Eigen::Map<const Eigen::VectorXd> bv(b.data(), static_cast<Eigen::Index>(b.size()));
  Eigen::Map<Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));

  if (settings_.method == LinearSolveSettings::Method::direct) {
    if (!impl_->same_pattern(m)) {
      impl_->lu.analyzePattern(m);
      impl_->remember_pattern(m);
    }
    impl_->lu.factorize(m);
    if (impl_->lu.info() != Eigen::Success)
      throw LinearSolveError("sparse LU factorisation failed: " + impl_->lu.lastErrorMessage());
    xv = impl_->lu.solve(bv);
  } else {
    Eigen::BiCGSTAB<SparseOperator::Matrix, Eigen::IncompleteLUT<double>> krylov;
    krylov.setTolerance(settings_.rel_tol);
    krylov.setMaxIterations(settings_.max_krylov_iters);
    krylov.compute(m);
    if (krylov.info() != Eigen::Success) throw LinearSolveError("ILUT preconditioner setup failed");
    xv = krylov.solveWithGuess(bv, bv);
    if (krylov.info() != Eigen::Success)
      throw LinearSolveError("BiCGSTAB did not converge in " + std::to_string(krylov.iterations()) +
                                 " iterations (relative residual " + std::to_string(krylov.error()) + ")",
                             krylov.error());
  }
  for (double v : x)
    if (!std::isfinite(v)) throw LinearSolveError("linear solve produced non-finite values");
}

ScalarField LinearSolver::solve(const SparseOperator& a, std::span<const double> b) {
  ScalarField x(a.size());
  solve(a, b, x);
  return x;
}

ScalarField solve(const SparseOperator& a, std::span<const double> b,
                  const LinearSolveSettings& settings) {
  LinearSolver solver(settings);
  return solver.solve(a, b);
}

}  // namespace mfg
