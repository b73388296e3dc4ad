// SPDX-License-Identifier: Apache-2.0
// Compiled with -mavx2 only; never called unless the CPU reports AVX2.
#include <immintrin.h>

#include "kernelcast/simd/kernels.hpp"

namespace kernelcast::simd {
namespace {

inline double finish(__m256d acc, const double* a, const double* b, std::size_t i, std::size_t n,
                     bool squared) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
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

double squared_l2_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  return finish(acc, a, b, i, n, true);
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  return finish(acc, a, b, i, n, false);
}

void squared_l2_rows_avx2(const double* q, const double* rows, std::size_t count, std::size_t n,
                          double* out) {
  for (std::size_t r = 0; r < count; ++r) out[r] = squared_l2_avx2(q, rows + r * n, n);
}

void dot_rows_avx2(const double* q, const double* rows, std::size_t count, std::size_t n,
                   double* out) {
  for (std::size_t r = 0; r < count; ++r) out[r] = dot_avx2(q, rows + r * n, n);
}

}  // namespace

const KernelTable& avx2_kernel_table() {
  static constexpr KernelTable table{Isa::avx2, squared_l2_avx2, dot_avx2, squared_l2_rows_avx2,
                                     dot_rows_avx2};
  return table;
}

}  // namespace kernelcast::simd
