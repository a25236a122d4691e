#pragma once

#include <string>
#include <vector>

#include "mfgpi/solvers.hpp"

namespace mfg {

/// Outcome of one (beta, zeta) cell across the horizon ladder.
struct SweepCell {
  double beta = 0.0;
  double zeta = 0.0;
  std::vector<bool> converged;   // per ladder entry
  std::vector<int> iterations;   // passes used per ladder entry
  std::vector<std::string> notes;  // failure reason per ladder entry, empty on success
  double max_t = 0.0;            // largest converged T; 0 if none
  bool capped = false;           // converged at the top of the ladder
  bool non_monotone = false;     // failed at some T below a converged one
};

/// Cells are stored row-major with rows indexed by zeta and columns by beta.
struct SweepResult {
  std::vector<double> betas;
  std::vector<double> zetas;
  std::vector<double> ladder;
  std::vector<SweepCell> cells;
  std::vector<std::string> warnings;

  const SweepCell& cell(std::size_t zeta_index, std::size_t beta_index) const {
    return cells[zeta_index * betas.size() + beta_index];
  }
};

/// Largest horizon on `ladder` for which `base.algorithm` converges, for every
/// (beta, zeta). The time step of the base scenario is kept fixed, so N grows
/// with T. Solver exceptions count as non-convergence. Cells run on up to
/// `jobs` threads; each solve owns its state.
///
/// Throws std::invalid_argument on empty lists or a ladder that is not
/// strictly increasing.
SweepResult max_t_sweep(const SolverConfig& base, const std::vector<double>& betas,
                        const std::vector<double>& zetas, const std::vector<double>& ladder,
                        int jobs = 1);

}  // namespace mfg
