// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace kernelcast {

/// Worker count: KERNELCAST_THREADS when set to a positive value, otherwise
/// the hardware concurrency (KERNELCAST_THREADS=0 also means "auto").
std::size_t thread_count();

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 = thread_count()).
/// Each index runs exactly once. If any invocation throws, the exception from
/// the lowest failing index is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t threads = 0);

}  // namespace kernelcast
