#include "mfgpi/simd.hpp"

#include <immintrin.h>

#include <cmath>
#include <limits>

// Compiled with -mavx2 only for this translation unit; callers reach these
// functions through the dispatch table after a CPUID check.

namespace mfg::simd {
namespace {

constexpr std::size_t kLanes = 4;

void second_difference(double* out, const double* lo, const double* mid,
                       const double* hi, std::size_t n, double scale) {
  const __m256d vscale = _mm256_set1_pd(scale);
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t k = 0;
  for (; k + kLanes <= n; k += kLanes) {
    const __m256d s = _mm256_add_pd(_mm256_loadu_pd(lo + k), _mm256_loadu_pd(hi + k));
    const __m256d c = _mm256_mul_pd(two, _mm256_loadu_pd(mid + k));
    const __m256d r = _mm256_mul_pd(vscale, _mm256_sub_pd(s, c));
    _mm256_storeu_pd(out + k, _mm256_add_pd(_mm256_loadu_pd(out + k), r));
  }
  for (; k < n; ++k) out[k] += scale * ((lo[k] + hi[k]) - 2.0 * mid[k]);
}

void one_sided_difference(double* left, double* right, const double* lo,
                          const double* mid, const double* hi, std::size_t n,
                          double inv_h) {
  const __m256d vinv = _mm256_set1_pd(inv_h);
  std::size_t k = 0;
  for (; k + kLanes <= n; k += kLanes) {
    const __m256d c = _mm256_loadu_pd(mid + k);
    _mm256_storeu_pd(left + k, _mm256_mul_pd(_mm256_sub_pd(c, _mm256_loadu_pd(lo + k)), vinv));
    _mm256_storeu_pd(right + k, _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(hi + k), c), vinv));
  }
  for (; k < n; ++k) {
    left[k] = (mid[k] - lo[k]) * inv_h;
    right[k] = (hi[k] - mid[k]) * inv_h;
  }
}

void eo_split(double* left, double* right, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + kLanes <= n; k += kLanes) {
    _mm256_storeu_pd(left + k, _mm256_max_pd(_mm256_loadu_pd(left + k), zero));
    _mm256_storeu_pd(right + k, _mm256_min_pd(_mm256_loadu_pd(right + k), zero));
  }
  for (; k < n; ++k) {
    left[k] = left[k] > 0.0 ? left[k] : 0.0;
    right[k] = right[k] < 0.0 ? right[k] : 0.0;
  }
}

void flux_divergence(double* out, const double* fl_mid, const double* fl_hi,
                     const double* fr_lo, const double* fr_mid, std::size_t n,
                     double inv_h) {
  const __m256d vinv = _mm256_set1_pd(inv_h);
  std::size_t k = 0;
  for (; k + kLanes <= n; k += kLanes) {
    const __m256d a = _mm256_sub_pd(_mm256_loadu_pd(fl_hi + k), _mm256_loadu_pd(fl_mid + k));
    const __m256d b = _mm256_sub_pd(_mm256_loadu_pd(fr_mid + k), _mm256_loadu_pd(fr_lo + k));
    const __m256d r = _mm256_mul_pd(_mm256_add_pd(a, b), vinv);
    _mm256_storeu_pd(out + k, _mm256_add_pd(_mm256_loadu_pd(out + k), r));
  }
  for (; k < n; ++k)
    out[k] += ((fl_hi[k] - fl_mid[k]) + (fr_mid[k] - fr_lo[k])) * inv_h;
}

void upwind_advection(double* out, const double* ql, const double* dl,
                      const double* qr, const double* dr, std::size_t n) {
  std::size_t k = 0;
  for (; k + kLanes <= n; k += kLanes) {
    const __m256d a = _mm256_mul_pd(_mm256_loadu_pd(ql + k), _mm256_loadu_pd(dl + k));
    const __m256d b = _mm256_mul_pd(_mm256_loadu_pd(qr + k), _mm256_loadu_pd(dr + k));
    _mm256_storeu_pd(out + k, _mm256_add_pd(_mm256_loadu_pd(out + k), _mm256_add_pd(a, b)));
  }
  for (; k < n; ++k) out[k] += ql[k] * dl[k] + qr[k] * dr[k];
}

void multiply(double* out, const double* a, const double* b, std::size_t n) {
  std::size_t k = 0;
  for (; k + kLanes <= n; k += kLanes)
    _mm256_storeu_pd(out + k, _mm256_mul_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k)));
  for (; k < n; ++k) out[k] = a[k] * b[k];
}

void accumulate_square(double* out, const double* a, std::size_t n) {
  std::size_t k = 0;
  for (; k + kLanes <= n; k += kLanes) {
    const __m256d v = _mm256_loadu_pd(a + k);
    _mm256_storeu_pd(out + k, _mm256_add_pd(_mm256_loadu_pd(out + k), _mm256_mul_pd(v, v)));
  }
  for (; k < n; ++k) out[k] += a[k] * a[k];
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d vmax = _mm256_setzero_pd();
  __m256d vnan = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + kLanes <= n; k += kLanes) {
    const __m256d d = _mm256_andnot_pd(
        sign, _mm256_sub_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k)));
    vnan = _mm256_or_pd(vnan, _mm256_cmp_pd(d, d, _CMP_UNORD_Q));
    vmax = _mm256_max_pd(vmax, d);
  }
  if (_mm256_movemask_pd(vnan) != 0) return std::numeric_limits<double>::quiet_NaN();
  alignas(32) double lanes[kLanes];
  _mm256_store_pd(lanes, vmax);
  double m = 0.0;
  for (double v : lanes)
    if (v > m) m = v;
  bool nan = false;
  for (; k < n; ++k) {
    const double d = std::fabs(a[k] - b[k]);
    if (d > m) m = d;
    nan = nan || d != d;
  }
  return nan ? std::numeric_limits<double>::quiet_NaN() : m;
}

double sum(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + kLanes <= n; k += kLanes) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + k));
  alignas(32) double lanes[kLanes];
  _mm256_store_pd(lanes, acc);
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; k < n; ++k) s += a[k];
  return s;
}

}  // namespace

const KernelTable* avx2_kernels() {
  static const KernelTable table{
      Isa::avx2,        second_difference, one_sided_difference,
      eo_split,         flux_divergence,   upwind_advection,
      multiply,         accumulate_square, max_abs_diff,
      sum,
  };
  return &table;
}

}  // namespace mfg::simd
