// SPDX-License-Identifier: Apache-2.0
#pragma once

// Inner-loop arithmetic behind every distance computation.
//
// Each instruction set provides the same table of kernels. All variants
// accumulate in four interleaved lanes (element i goes to lane i % 4), finish
// the tail into the low lanes and combine as (l0 + l1) + (l2 + l3). With FP
// contraction disabled this makes every variant bit-identical to the scalar
// reference, so swapping the active table never changes a result.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace kernelcast::simd {

enum class Isa { scalar, avx2, neon };

std::string_view to_string(Isa isa);

struct KernelTable {
  Isa isa;
  /// sum_i (a_i - b_i)^2
  double (*squared_l2)(const double* a, const double* b, std::size_t n);
  /// sum_i a_i * b_i
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// out[r] = squared_l2(q, rows + r * n, n) for r in [0, count)
  void (*squared_l2_rows)(const double* q, const double* rows, std::size_t count, std::size_t n,
                          double* out);
  /// out[r] = dot(q, rows + r * n, n) for r in [0, count)
  void (*dot_rows)(const double* q, const double* rows, std::size_t count, std::size_t n,
                   double* out);
};

const KernelTable& scalar_kernels();
/// nullptr when the variant is not compiled in or the CPU lacks the feature.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

/// Every table usable on this machine, scalar first.
std::vector<const KernelTable*> available_kernels();

/// The table used by the library. Picked once: the best available variant,
/// unless KERNELCAST_SIMD names another available one (scalar, avx2, neon).
const KernelTable& active_kernels();

inline double squared_l2(std::span<const double> a, std::span<const double> b) {
  return active_kernels().squared_l2(a.data(), b.data(), a.size());
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active_kernels().dot(a.data(), b.data(), a.size());
}

}  // namespace kernelcast::simd
