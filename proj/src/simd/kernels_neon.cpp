// SPDX-License-Identifier: Apache-2.0
// Two float64x2 registers stand in for the four accumulation lanes.
#include <arm_neon.h>

#include "kernelcast/simd/kernels.hpp"

namespace kernelcast::simd {
namespace {

inline double finish(float64x2_t lo, float64x2_t hi, const double* a, const double* b,
                     std::size_t i, std::size_t n, bool squared) {
  double lane[4];
  vst1q_f64(lane, lo);
  vst1q_f64(lane + 2, hi);
  for (std::size_t l = 0; i + l < n; ++l) {
    double term;
    if (squared) {
      const double d = a[i + l] - b[i + l];
      term = d * d;
    } else {
      term = a[i + l] * b[i + l];
    }
    lane[l] = lane[l] + term;
  }
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double squared_l2_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0);
  float64x2_t hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float64x2_t d0 = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    const float64x2_t d1 = vsubq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    lo = vaddq_f64(lo, vmulq_f64(d0, d0));
    hi = vaddq_f64(hi, vmulq_f64(d1, d1));
  }
  return finish(lo, hi, a, b, i, n, true);
}

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0);
  float64x2_t hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lo = vaddq_f64(lo, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    hi = vaddq_f64(hi, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
  }
  return finish(lo, hi, a, b, i, n, false);
}

void squared_l2_rows_neon(const double* q, const double* rows, std::size_t count, std::size_t n,
                          double* out) {
  for (std::size_t r = 0; r < count; ++r) out[r] = squared_l2_neon(q, rows + r * n, n);
}

void dot_rows_neon(const double* q, const double* rows, std::size_t count, std::size_t n,
                   double* out) {
  for (std::size_t r = 0; r < count; ++r) out[r] = dot_neon(q, rows + r * n, n);
}

}  // namespace

const KernelTable& neon_kernel_table() {
  static constexpr KernelTable table{Isa::neon, squared_l2_neon, dot_neon, squared_l2_rows_neon,
                                     dot_rows_neon};
  return table;
}

}  // namespace kernelcast::simd
