// SPDX-License-Identifier: Apache-2.0
#pragma once

// Seeded randomness with results that do not depend on the standard library
// vendor: std::uniform_int_distribution and std::shuffle are
// implementation-defined, so index draws and shuffles are done here on top of
// the (fully specified) mt19937_64 engine.

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace kernelcast {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a parent seed and a salt.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  return mix64(mix64(seed) ^ (salt + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Uniform integer in [0, n). n must be positive.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  // Rejection sampling over the largest multiple of n below 2^64.
  const std::uint64_t limit = std::uint64_t(0) - (std::uint64_t(0) - n) % n;
  for (;;) {
    const std::uint64_t v = rng();
    if (limit == 0 || v < limit) return v % n;
  }
}

/// Uniform real in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <typename T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_index(rng, i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace kernelcast
