#include "mfgpi/simd.hpp"

#include <arm_neon.h>

#include <cmath>
#include <limits>

namespace mfg::simd {
namespace {

constexpr std::size_t kLanes = 2;

void second_difference(double* out, const double* lo, const double* mid,
                       const double* hi, std::size_t n, double scale) {
  const float64x2_t vscale = vdupq_n_f64(scale);
  const float64x2_t two = vdupq_n_f64(2.0);
  std::size_t k = 0;
  for (; k + kLanes <= n; k += kLanes) {
    const float64x2_t s = vaddq_f64(vld1q_f64(lo + k), vld1q_f64(hi + k));
    const float64x2_t c = vmulq_f64(two, vld1q_f64(mid + k));
    const float64x2_t r = vmulq_f64(vscale, vsubq_f64(s, c));
    vst1q_f64(out + k, vaddq_f64(vld1q_f64(out + k), r));
  }
  for (; k < n; ++k) out[k] += scale * ((lo[k] + hi[k]) - 2.0 * mid[k]);
}

void one_sided_difference(double* left, double* right, const double* lo,
                          const double* mid, const double* hi, std::size_t n,
                          double inv_h) {
  const float64x2_t vinv = vdupq_n_f64(inv_h);
  std::size_t k = 0;
  for (; k + kLanes <= n; k += kLanes) {
    const float64x2_t c = vld1q_f64(mid + k);
    vst1q_f64(left + k, vmulq_f64(vsubq_f64(c, vld1q_f64(lo + k)), vinv));
    vst1q_f64(right + k, vmulq_f64(vsubq_f64(vld1q_f64(hi + k), c), vinv));
  }
  for (; k < n; ++k) {
    left[k] = (mid[k] - lo[k]) * inv_h;
    right[k] = (hi[k] - mid[k]) * inv_h;
  }
}

void eo_split(double* left, double* right, std::size_t n) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t k = 0;
  for (; k + kLanes <= n; k += kLanes) {
    const float64x2_t l = vld1q_f64(left + k);
    const float64x2_t r = vld1q_f64(right + k);
    vst1q_f64(left + k, vbslq_f64(vcgtq_f64(l, zero), l, zero));
    vst1q_f64(right + k, vbslq_f64(vcltq_f64(r, zero), r, zero));
  }
  for (; k < n; ++k) {
    left[k] = left[k] > 0.0 ? left[k] : 0.0;
    right[k] = right[k] < 0.0 ? right[k] : 0.0;
  }
}

void flux_divergence(double* out, const double* fl_mid, const double* fl_hi,
                     const double* fr_lo, const double* fr_mid, std::size_t n,
                     double inv_h) {
  const float64x2_t vinv = vdupq_n_f64(inv_h);
  std::size_t k = 0;
  for (; k + kLanes <= n; k += kLanes) {
    const float64x2_t a = vsubq_f64(vld1q_f64(fl_hi + k), vld1q_f64(fl_mid + k));
    const float64x2_t b = vsubq_f64(vld1q_f64(fr_mid + k), vld1q_f64(fr_lo + k));
    vst1q_f64(out + k, vaddq_f64(vld1q_f64(out + k), vmulq_f64(vaddq_f64(a, b), vinv)));
  }
  for (; k < n; ++k)
    out[k] += ((fl_hi[k] - fl_mid[k]) + (fr_mid[k] - fr_lo[k])) * inv_h;
}

void upwind_advection(double* out, const double* ql, const double* dl,
                      const double* qr, const double* dr, std::size_t n) {
  std::size_t k = 0;
  for (; k + kLanes <= n; k += kLanes) {
    const float64x2_t a = vmulq_f64(vld1q_f64(ql + k), vld1q_f64(dl + k));
    const float64x2_t b = vmulq_f64(vld1q_f64(qr + k), vld1q_f64(dr + k));
    vst1q_f64(out + k, vaddq_f64(vld1q_f64(out + k), vaddq_f64(a, b)));
  }
  for (; k < n; ++k) out[k] += ql[k] * dl[k] + qr[k] * dr[k];
}

void multiply(double* out, const double* a, const double* b, std::size_t n) {
  std::size_t k = 0;
  for (; k + kLanes <= n; k += kLanes)
    vst1q_f64(out + k, vmulq_f64(vld1q_f64(a + k), vld1q_f64(b + k)));
  for (; k < n; ++k) out[k] = a[k] * b[k];
}

void accumulate_square(double* out, const double* a, std::size_t n) {
  std::size_t k = 0;
  for (; k + kLanes <= n; k += kLanes) {
    const float64x2_t v = vld1q_f64(a + k);
    vst1q_f64(out + k, vaddq_f64(vld1q_f64(out + k), vmulq_f64(v, v)));
  }
  for (; k < n; ++k) out[k] += a[k] * a[k];
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
  float64x2_t vmax = vdupq_n_f64(0.0);
  uint64x2_t vnum = vdupq_n_u64(~0ULL);
  std::size_t k = 0;
  for (; k + kLanes <= n; k += kLanes) {
    const float64x2_t d = vabsq_f64(vsubq_f64(vld1q_f64(a + k), vld1q_f64(b + k)));
    vnum = vandq_u64(vnum, vceqq_f64(d, d));
    vmax = vbslq_f64(vcgtq_f64(d, vmax), d, vmax);
  }
  if (vgetq_lane_u64(vnum, 0) == 0 || vgetq_lane_u64(vnum, 1) == 0)
    return std::numeric_limits<double>::quiet_NaN();
  double m = 0.0;
  for (int lane = 0; lane < 2; ++lane) {
    const double v = lane == 0 ? vgetq_lane_f64(vmax, 0) : vgetq_lane_f64(vmax, 1);
    if (v > m) m = v;
  }
  bool nan = false;
  for (; k < n; ++k) {
    const double d = std::fabs(a[k] - b[k]);
    if (d > m) m = d;
    nan = nan || d != d;
  }
  return nan ? std::numeric_limits<double>::quiet_NaN() : m;
}

double sum(const double* a, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t k = 0;
  for (; k + kLanes <= n; k += kLanes) acc = vaddq_f64(acc, vld1q_f64(a + k));
  double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; k < n; ++k) s += a[k];
  return s;
}

}  // namespace

const KernelTable* neon_kernels() {
  static const KernelTable table{
      Isa::neon,        second_difference, one_sided_difference,
      eo_split,         flux_divergence,   upwind_advection,
      multiply,         accumulate_square, max_abs_diff,
      sum,
  };
  return &table;
}

}  // namespace mfg::simd
