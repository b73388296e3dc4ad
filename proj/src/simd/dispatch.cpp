// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <string_view>

#include "kernelcast/simd/kernels.hpp"

namespace kernelcast::simd {

#if defined(KERNELCAST_HAVE_AVX2)
const KernelTable& avx2_kernel_table();
#endif
#if defined(KERNELCAST_HAVE_NEON)
const KernelTable& neon_kernel_table();
#endif

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

const KernelTable* avx2_kernels() {
#if defined(KERNELCAST_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &avx2_kernel_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon_kernels() {
#if defined(KERNELCAST_HAVE_NEON)
  // Advanced SIMD is mandatory on AArch64.
  return &neon_kernel_table();
#else
  return nullptr;
#endif
}

std::vector<const KernelTable*> available_kernels() {
  std::vector<const KernelTable*> out{&scalar_kernels()};
  if (const auto* t = avx2_kernels()) out.push_back(t);
  if (const auto* t = neon_kernels()) out.push_back(t);
  return out;
}

namespace {

const KernelTable& select_kernels() {
  const auto tables = available_kernels();
  if (const char* env = std::getenv("KERNELCAST_SIMD"); env != nullptr) {
    const std::string_view wanted(env);
    for (const auto* t : tables) {
      if (to_string(t->isa) == wanted) return *t;
    }
  }
  return *tables.back();
}

}  // namespace

const KernelTable& active_kernels() {
  static const KernelTable& table = select_kernels();
  return table;
}

}  // namespace kernelcast::simd
