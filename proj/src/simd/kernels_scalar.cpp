#include "mfgpi/simd.hpp"

#include <cmath>
#include <limits>

namespace mfg::simd {
namespace {

void second_difference(double* out, const double* lo, const double* mid,
                       const double* hi, std::size_t n, double scale) {
  for (std::size_t k = 0; k < n; ++k)
    out[k] += scale * ((lo[k] + hi[k]) - 2.0 * mid[k]);
}

void one_sided_difference(double* left, double* right, const double* lo,
                          const double* mid, const double* hi, std::size_t n,
                          double inv_h) {
  for (std::size_t k = 0; k < n; ++k) {
    left[k] = (mid[k] - lo[k]) * inv_h;
    right[k] = (hi[k] - mid[k]) * inv_h;
  }
}

void eo_split(double* left, double* right, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    left[k] = left[k] > 0.0 ? left[k] : 0.0;
    right[k] = right[k] < 0.0 ? right[k] : 0.0;
  }
}

void flux_divergence(double* out, const double* fl_mid, const double* fl_hi,
                     const double* fr_lo, const double* fr_mid, std::size_t n,
                     double inv_h) {
  for (std::size_t k = 0; k < n; ++k)
    out[k] += ((fl_hi[k] - fl_mid[k]) + (fr_mid[k] - fr_lo[k])) * inv_h;
}

void upwind_advection(double* out, const double* ql, const double* dl,
                      const double* qr, const double* dr, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) out[k] += ql[k] * dl[k] + qr[k] * dr[k];
}

void multiply(double* out, const double* a, const double* b, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * b[k];
}

void accumulate_square(double* out, const double* a, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) out[k] += a[k] * a[k];
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
  double m = 0.0;
  bool nan = false;
  for (std::size_t k = 0; k < n; ++k) {
    const double d = std::fabs(a[k] - b[k]);
    if (d > m) m = d;
    nan = nan || d != d;
  }
  return nan ? std::numeric_limits<double>::quiet_NaN() : m;
}

double sum(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += a[k];
  return s;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{
      Isa::scalar,      second_difference, one_sided_difference,
      eo_split,         flux_divergence,   upwind_advection,
      multiply,         accumulate_square, max_abs_diff,
      sum,
  };
  return table;
}

}  // namespace mfg::simd
