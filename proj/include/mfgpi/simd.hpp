#pragma once

// Line kernels for the grid stencils.
//
// Every stencil on the periodic lattice is applied one contiguous "line" at a
// time: the caller hands over pointers to the left-neighbour, centre and
// right-neighbour runs (for the in-row axis these are the same row shifted by
// one, for the cross-row axis they are adjacent rows) and the kernel does the
// arithmetic. Wrap-around points are handled by the caller with n == 1 calls.
//
// Each instruction set provides the same table. Elementwise kernels produce
// bit-identical results across tables; the two reductions may differ in the
// last bits of `sum` because lanes are added in a different order.

#include <cstddef>
#include <string_view>

namespace mfg::simd {

enum class Isa { scalar, avx2, neon };

struct KernelTable {
  Isa isa;

  // out[k] += scale * ((lo[k] + hi[k]) - 2 * mid[k])
  void (*second_difference)(double* out, const double* lo, const double* mid,
                            const double* hi, std::size_t n, double scale);

  // left[k] = (mid[k] - lo[k]) * inv_h, right[k] = (hi[k] - mid[k]) * inv_h
  void (*one_sided_difference)(double* left, double* right, const double* lo,
                               const double* mid, const double* hi,
                               std::size_t n, double inv_h);

  // left[k] = left[k] > 0 ? left[k] : 0, right[k] = right[k] < 0 ? right[k] : 0
  void (*eo_split)(double* left, double* right, std::size_t n);

  // out[k] += ((fl_hi[k] - fl_mid[k]) + (fr_mid[k] - fr_lo[k])) * inv_h
  void (*flux_divergence)(double* out, const double* fl_mid, const double* fl_hi,
                          const double* fr_lo, const double* fr_mid,
                          std::size_t n, double inv_h);

  // out[k] += ql[k] * dl[k] + qr[k] * dr[k]
  void (*upwind_advection)(double* out, const double* ql, const double* dl,
                           const double* qr, const double* dr, std::size_t n);

  // out[k] = a[k] * b[k]
  void (*multiply)(double* out, const double* a, const double* b, std::size_t n);

  // out[k] += a[k] * a[k]
  void (*accumulate_square)(double* out, const double* a, std::size_t n);

  double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
  double (*sum)(const double* a, std::size_t n);
};

const KernelTable& scalar_kernels();

// Returns nullptr when the table was not compiled into this binary.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

bool isa_supported(Isa isa);
std::string_view isa_name(Isa isa);

// Active table. Picked once on first use: the best ISA the CPU supports,
// unless MFGPI_SIMD=scalar|avx2|neon names a supported one.
const KernelTable& kernels();
Isa active_isa();

// Throws std::invalid_argument if the ISA is unavailable on this machine.
const KernelTable& kernels_for(Isa isa);

}  // namespace mfg::simd
