#pragma once

// Finite-difference operators on the periodic lattice: centred Laplacian,
// one-sided gradients, Engquist-Osher splitting and the conservative upwind
// divergence. 2D operators are sums of the 1D stencils along each axis.
//
// All functions are pure. Arguments must be sized to the grid; mismatches
// throw std::invalid_argument.

#include <span>

#include "mfgpi/grid.hpp"

namespace mfg {

/// (U[i-1] - 2U[i] + U[i+1]) / h^2, summed over dimensions.
ScalarField laplacian_apply(const SpaceGrid& grid, std::span<const double> u);
void laplacian_apply(const SpaceGrid& grid, std::span<const double> u, std::span<double> out);

/// Left/right one-sided differences per dimension.
StaggeredPolicy upwind_gradient(const SpaceGrid& grid, std::span<const double> u);
void upwind_gradient(const SpaceGrid& grid, std::span<const double> u, StaggeredPolicy& out);

/// Positive part of every left component, negative part of every right one.
StaggeredPolicy eo_split(const StaggeredPolicy& q);
void eo_split_in_place(StaggeredPolicy& q);

/// Per-node sum of squares of all components of an EO-split policy.
/// Throws std::invalid_argument if a left component is below -1e-14 or a
/// right component above 1e-14.
ScalarField eo_norm_sq(const StaggeredPolicy& qpm);

/// Conservative upwind divergence of the flux M*Q for an EO-split Q:
///   (M[i+1] Q+_L[i+1] - M[i] Q+_L[i]) / h + (M[i] Q-_R[i] - M[i-1] Q-_R[i-1]) / h
ScalarField divergence(const SpaceGrid& grid, std::span<const double> m,
                       const StaggeredPolicy& qpm);

/// Q+_L . D_L U + Q-_R . D_R U per node.
ScalarField advect(const SpaceGrid& grid, const StaggeredPolicy& qpm, std::span<const double> u);

/// h^dim * sum of node values.
double total_mass(const SpaceGrid& grid, std::span<const double> m);

/// max |a - b| over all entries. Throws std::invalid_argument on size mismatch.
double max_abs_diff(std::span<const double> a, std::span<const double> b);

}  // namespace mfg
