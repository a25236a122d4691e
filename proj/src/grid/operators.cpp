#include "mfgpi/operators.hpp"

#include <cmath>
#include <stdexcept>

#include "mfgpi/simd.hpp"

namespace mfg {
namespace {

void require_size(const SpaceGrid& grid, std::size_t n, const char* what) {
  if (n != grid.size())
    throw std::invalid_argument(std::string(what) + ": field has " + std::to_string(n) +
                                " entries, grid has " + std::to_string(grid.size()));
}

void require_policy(const SpaceGrid& grid, const StaggeredPolicy& q, const char* what) {
  if (q.dim() != grid.dim() || q.node_count() != grid.size())
    throw std::invalid_argument(std::string(what) + ": policy shape does not match grid");
}

// Calls fn(out, lo, mid, hi, n) with flat offsets for every contiguous run of
// nodes along `axis`; lo/mid/hi are the left neighbour, the node and
// the right neighbour. Wrap-around nodes of the in-row axis come as n == 1.
template <class Fn>
void for_each_line(const SpaceGrid& grid, int axis, Fn&& fn) {
  const std::size_t n = static_cast<std::size_t>(grid.nodes_per_dim());
  const std::size_t rows = grid.dim() == 1 ? 1 : n;
  if (axis == 0) {
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t base = r * n;
      fn(base + 1, base, base + 1, base + 2, n - 2);
      fn(base, base + n - 1, base, base + 1, std::size_t{1});
      fn(base + n - 1, base + n - 2, base + n - 1, base, std::size_t{1});
    }
  } else {
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t lo = ((r + rows - 1) % rows) * n;
      const std::size_t hi = ((r + 1) % rows) * n;
      fn(r * n, lo, r * n, hi, n);
    }
  }
}

}  // namespace

void laplacian_apply(const SpaceGrid& grid, std::span<const double> u, std::span<double> out) {
  require_size(grid, u.size(), "laplacian");
  require_size(grid, out.size(), "laplacian");
  const auto& k = simd::kernels();
  const double inv_h2 = grid.inv_spacing() * grid.inv_spacing();
  std::fill(out.begin(), out.end(), 0.0);
  for (int axis = 0; axis < grid.dim(); ++axis)
    for_each_line(grid, axis, [&](std::size_t o, std::size_t lo, std::size_t mid, std::size_t hi,
                                  std::size_t n) {
      k.second_difference(out.data() + o, u.data() + lo, u.data() + mid, u.data() + hi, n, inv_h2);
    });
}

ScalarField laplacian_apply(const SpaceGrid& grid, std::span<const double> u) {
  ScalarField out(grid.size());
  laplacian_apply(grid, u, out);
  return out;
}

void upwind_gradient(const SpaceGrid& grid, std::span<const double> u, StaggeredPolicy& out) {
  require_size(grid, u.size(), "upwind_gradient");
  if (!(out.dim() == grid.dim() && out.node_count() == grid.size()))
    out = StaggeredPolicy(grid.dim(), grid.size());
  const auto& k = simd::kernels();
  const double inv_h = grid.inv_spacing();
  for (int axis = 0; axis < grid.dim(); ++axis) {
    double* left = out.left(axis).data();
    double* right = out.right(axis).data();
    for_each_line(grid, axis, [&](std::size_t o, std::size_t lo, std::size_t mid, std::size_t hi,
                                  std::size_t n) {
      k.one_sided_difference(left + o, right + o, u.data() + lo, u.data() + mid, u.data() + hi, n,
                             inv_h);
    });
  }
}

StaggeredPolicy upwind_gradient(const SpaceGrid& grid, std::span<const double> u) {
  StaggeredPolicy out(grid.dim(), grid.size());
  upwind_gradient(grid, u, out);
  return out;
}

void eo_split_in_place(StaggeredPolicy& q) {
  const auto& k = simd::kernels();
  for (int d = 0; d < q.dim(); ++d) k.eo_split(q.left(d).data(), q.right(d).data(), q.node_count());
}

StaggeredPolicy eo_split(const StaggeredPolicy& q) {
  StaggeredPolicy out = q;
  eo_split_in_place(out);
  return out;
}

ScalarField eo_norm_sq(const StaggeredPolicy& qpm) {
  constexpr double kSlack = 1e-14;
  for (int d = 0; d < qpm.dim(); ++d) {
    for (double v : qpm.left(d))
      if (v < -kSlack) throw std::invalid_argument("eo_norm_sq: left component is negative");
    for (double v : qpm.right(d))
      if (v > kSlack) throw std::invalid_argument("eo_norm_sq: right component is positive");
  }
  ScalarField out(qpm.node_count(), 0.0);
  const auto& k = simd::kernels();
  for (std::size_t c = 0; c < qpm.component_count(); ++c)
    k.accumulate_square(out.data(), qpm.component(c).data(), qpm.node_count());
  return out;
}

ScalarField divergence(const SpaceGrid& grid, std::span<const double> m,
                       const StaggeredPolicy& qpm) {
  require_size(grid, m.size(), "divergence");
  require_policy(grid, qpm, "divergence");
  const auto& k = simd::kernels();
  const std::size_t size = grid.size();
  ScalarField out(size, 0.0);
  ScalarField fl(size), fr(size);
  for (int axis = 0; axis < grid.dim(); ++axis) {
    k.multiply(fl.data(), m.data(), qpm.left(axis).data(), size);
    k.multiply(fr.data(), m.data(), qpm.right(axis).data(), size);
    for_each_line(grid, axis, [&](std::size_t o, std::size_t lo, std::size_t mid, std::size_t hi,
                                  std::size_t n) {
      k.flux_divergence(out.data() + o, fl.data() + mid, fl.data() + hi, fr.data() + lo,
                        fr.data() + mid, n, grid.inv_spacing());
    });
  }
  return out;
}

ScalarField advect(const SpaceGrid& grid, const StaggeredPolicy& qpm, std::span<const double> u) {
  require_size(grid, u.size(), "advect");
  require_policy(grid, qpm, "advect");
  const auto& k = simd::kernels();
  const StaggeredPolicy grad = upwind_gradient(grid, u);
  ScalarField out(grid.size(), 0.0);
  for (int d = 0; d < grid.dim(); ++d)
    k.upwind_advection(out.data(), qpm.left(d).data(), grad.left(d).data(), qpm.right(d).data(),
                       grad.right(d).data(), grid.size());
  return out;
}

double total_mass(const SpaceGrid& grid, std::span<const double> m) {
  require_size(grid, m.size(), "total_mass");
  const double cell = grid.dim() == 1 ? grid.spacing() : grid.spacing() * grid.spacing();
  return cell * simd::kernels().sum(m.data(), m.size());
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("max_abs_diff: size mismatch");
  return simd::kernels().max_abs_diff(a.data(), b.data(), a.size());
}

}  // namespace mfg
