#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mfg {

/// Uniform periodic lattice on the unit torus in one or two dimensions.
///
/// Nodes sit at x = i*h, i = 0..I-1, per dimension. In 2D the flat node index
/// is i + I*j, so each x2 = const line is contiguous in memory.
class SpaceGrid {
 public:
  /// Throws std::invalid_argument unless dim is 1 or 2 and nodes_per_dim >= 3.
  SpaceGrid(int dim, int nodes_per_dim);

  int dim() const { return dim_; }
  int nodes_per_dim() const { return nodes_; }
  double spacing() const { return h_; }
  double inv_spacing() const { return static_cast<double>(nodes_); }
  std::size_t size() const { return size_; }

  /// Flat index of the node with per-dimension indices (i, j); j ignored in 1D.
  std::size_t index(int i, int j = 0) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(nodes_) * static_cast<std::size_t>(j);
  }
  /// Coordinate of node k along dimension d.
  double coordinate(std::size_t k, int d) const;

  bool operator==(const SpaceGrid&) const = default;

 private:
  int dim_;
  int nodes_;
  double h_;
  std::size_t size_;
};

class TimeGrid {
 public:
  /// Throws std::invalid_argument unless steps >= 1 and horizon > 0.
  TimeGrid(int steps, double horizon);

  int steps() const { return steps_; }
  double horizon() const { return horizon_; }
  double dt() const { return dt_; }
  double time(int n) const { return n == steps_ ? horizon_ : n * dt_; }

 private:
  int steps_;
  double horizon_;
  double dt_;
};

/// (i + I) mod I, for any integer i.
constexpr int wrap_index(int i, int n) {
  const int r = i % n;
  return r < 0 ? r + n : r;
}

using ScalarField = std::vector<double>;

/// A scalar field on every time node: slice n holds the values at t_n.
class TimeField {
 public:
  TimeField() = default;
  TimeField(std::size_t slices, std::size_t nodes, double fill = 0.0)
      : slices_(slices), nodes_(nodes), data_(slices * nodes, fill) {}

  std::size_t slice_count() const { return slices_; }
  std::size_t node_count() const { return nodes_; }

  std::span<double> slice(std::size_t n) { return {data_.data() + n * nodes_, nodes_}; }
  std::span<const double> slice(std::size_t n) const {
    return {data_.data() + n * nodes_, nodes_};
  }
  void set_slice(std::size_t n, std::span<const double> values);

  std::span<const double> values() const { return data_; }
  std::span<double> values() { return data_; }

  bool same_shape(const TimeField& other) const {
    return slices_ == other.slices_ && nodes_ == other.nodes_;
  }

 private:
  std::size_t slices_ = 0;
  std::size_t nodes_ = 0;
  std::vector<double> data_;
};

/// Discrete control: per node and dimension a (left, right) pair.
///
/// Stored component-major: component c = 2*d + side (side 0 = left,
/// 1 = right) occupies one contiguous run of node values.
class StaggeredPolicy {
 public:
  StaggeredPolicy() = default;
  StaggeredPolicy(int dim, std::size_t nodes, double fill = 0.0)
      : dim_(dim), nodes_(nodes), data_(2 * static_cast<std::size_t>(dim) * nodes, fill) {}

  int dim() const { return dim_; }
  std::size_t node_count() const { return nodes_; }
  std::size_t component_count() const { return 2 * static_cast<std::size_t>(dim_); }

  std::span<double> component(std::size_t c) { return {data_.data() + c * nodes_, nodes_}; }
  std::span<const double> component(std::size_t c) const {
    return {data_.data() + c * nodes_, nodes_};
  }
  std::span<double> left(int d) { return component(2 * static_cast<std::size_t>(d)); }
  std::span<double> right(int d) { return component(2 * static_cast<std::size_t>(d) + 1); }
  std::span<const double> left(int d) const { return component(2 * static_cast<std::size_t>(d)); }
  std::span<const double> right(int d) const {
    return component(2 * static_cast<std::size_t>(d) + 1);
  }

  std::span<const double> values() const { return data_; }
  std::span<double> values() { return data_; }

  bool same_shape(const StaggeredPolicy& other) const {
    return dim_ == other.dim_ && nodes_ == other.nodes_;
  }

 private:
  int dim_ = 0;
  std::size_t nodes_ = 0;
  std::vector<double> data_;
};

/// One policy per time interval [t_n, t_{n+1}), n = 0..N-1.
using PolicyTimeField = std::vector<StaggeredPolicy>;

PolicyTimeField zero_policy(const SpaceGrid& grid, const TimeGrid& time);

}  // namespace mfg
