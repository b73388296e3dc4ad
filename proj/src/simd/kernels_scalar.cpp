// SPDX-License-Identifier: Apache-2.0
#include "kernelcast/simd/kernels.hpp"

namespace kernelcast::simd {
namespace {

double squared_l2_scalar(const double* a, const double* b, std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (std::size_t l = 0; l < 4; ++l) {
      const double d = a[i + l] - b[i + l];
      const double sq = d * d;
      lane[l] = lane[l] + sq;
    }
  }
  for (std::size_t l = 0; i + l < n; ++l) {
    const double d = a[i + l] - b[i + l];
    const double sq = d * d;
    lane[l] = lane[l] + sq;
  }
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (std::size_t l = 0; l < 4; ++l) {
      const double p = a[i + l] * b[i + l];
      lane[l] = lane[l] + p;
    }
  }
  for (std::size_t l = 0; i + l < n; ++l) {
    const double p = a[i + l] * b[i + l];
    lane[l] = lane[l] + p;
  }
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

void squared_l2_rows_scalar(const double* q, const double* rows, std::size_t count, std::size_t n,
                            double* out) {
  for (std::size_t r = 0; r < count; ++r) out[r] = squared_l2_scalar(q, rows + r * n, n);
}

void dot_rows_scalar(const double* q, const double* rows, std::size_t count, std::size_t n,
                     double* out) {
  for (std::size_t r = 0; r < count; ++r) out[r] = dot_scalar(q, rows + r * n, n);
}

}  // namespace

const KernelTable& scalar_kernels() {
  static constexpr KernelTable table{Isa::scalar, squared_l2_scalar, dot_scalar,
                                     squared_l2_rows_scalar, dot_rows_scalar};
  return table;
}

}  // namespace kernelcast::simd
