#include "mfgpi/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mfg {

SpaceGrid::SpaceGrid(int dim, int nodes_per_dim) : dim_(dim), nodes_(nodes_per_dim) {
  if (dim != 1 && dim != 2)
    throw std::invalid_argument("grid dimension must be 1 or 2, got " + std::to_string(dim));
  if (nodes_per_dim < 3)
    throw std::invalid_argument("grid needs at least 3 nodes per dimension, got " +
                                std::to_string(nodes_per_dim));
  h_ = 1.0 / nodes_per_dim;
  size_ = static_cast<std::size_t>(nodes_per_dim);
  if (dim == 2) size_ *= static_cast<std::size_t>(nodes_per_dim);
}

double SpaceGrid::coordinate(std::size_t k, int d) const {
  const std::size_t n = static_cast<std::size_t>(nodes_);
  const std::size_t i = d == 0 ? k % n : k / n;
  return static_cast<double>(i) / nodes_;
}

TimeGrid::TimeGrid(int steps, double horizon) : steps_(steps), horizon_(horizon) {
  if (steps < 1) throw std::invalid_argument("time grid needs N >= 1");
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("time horizon T must be positive and finite");
  dt_ = horizon / steps;
}

void TimeField::set_slice(std::size_t n, std::span<const double> values) {
  if (values.size() != nodes_) throw std::invalid_argument("slice size mismatch");
  std::copy(values.begin(), values.end(), slice(n).begin());
}

PolicyTimeField zero_policy(const SpaceGrid& grid, const TimeGrid& time) {
  return PolicyTimeField(static_cast<std::size_t>(time.steps()),
                         StaggeredPolicy(grid.dim(), grid.size()));
}

}  // namespace mfg
