#pragma once

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "mfgpi/grid.hpp"

namespace mfg {

class LinearSolveError : public std::runtime_error {
 public:
  LinearSolveError(const std::string& what, double achieved_residual = -1.0)
      : std::runtime_error(what), achieved_residual_(achieved_residual) {}
  /// Relative residual reached before giving up, or -1 if not applicable.
  double achieved_residual() const { return achieved_residual_; }

 private:
  double achieved_residual_;
};

/// Square sparse matrix with at most 1 + 4*dim nonzeros per row.
class SparseOperator {
 public:
  using Matrix = Eigen::SparseMatrix<double>;

  SparseOperator() = default;
  explicit SparseOperator(Matrix m) : m_(std::move(m)) {}

  std::size_t size() const { return static_cast<std::size_t>(m_.rows()); }
  const Matrix& matrix() const { return m_; }

  double coeff(std::size_t row, std::size_t col) const {
    return m_.coeff(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
  }
  ScalarField apply(std::span<const double> x) const;
  ScalarField row_sums() const;
  ScalarField column_sums() const;
  std::vector<std::vector<double>> to_dense() const;

 private:
  Matrix m_;
};

struct LinearSolveSettings {
  enum class Method { direct, krylov };
  Method method = Method::direct;
  double rel_tol = 1e-12;
  int max_krylov_iters = 1000;
};

/// One implicit-Euler step of the Fokker-Planck equation:
///   A M_{n+1} = M_{n+1} - dt (eps Lap M_{n+1} + div(M_{n+1} Q±)).
/// Columns sum to one. `qpm` must be EO-split.
SparseOperator assemble_fp_matrix(const SpaceGrid& grid, double dt, double epsilon,
                                  const StaggeredPolicy& qpm);

/// One implicit-Euler step of the linear (advection-form) HJB equation:
///   A U_n = U_n - dt (eps Lap U_n - Q± . D U_n).
/// Rows sum to one; off-diagonals are non-positive. This is the transpose of
/// the FP matrix for the same Q±.
SparseOperator assemble_hjb_matrix(const SpaceGrid& grid, double dt, double epsilon,
                                   const StaggeredPolicy& qpm);

/// Solves A x = b. Reuses the symbolic factorisation while the sparsity
/// pattern stays the same, so one instance should serve one sweep.
/// Not thread-safe; use one instance per worker.
class LinearSolver {
 public:
  explicit LinearSolver(LinearSolveSettings settings = {});
  ~LinearSolver();
  LinearSolver(LinearSolver&&) noexcept;
  LinearSolver& operator=(LinearSolver&&) noexcept;

  const LinearSolveSettings& settings() const { return settings_; }

  void solve(const SparseOperator& a, std::span<const double> b, std::span<double> x);
  ScalarField solve(const SparseOperator& a, std::span<const double> b);

 private:
  struct Impl;
  LinearSolveSettings settings_;
  std::unique_ptr<Impl> impl_;
};

ScalarField solve(const SparseOperator& a, std::span<const double> b,
                  const LinearSolveSettings& settings = {});

}  // namespace mfg
