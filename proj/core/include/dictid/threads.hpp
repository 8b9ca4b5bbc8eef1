#pragma once

#include <cstdint>
#include <functional>

namespace dictid {

/// Worker-count resolution order: explicit argument > DICTID_THREADS env
/// > hardware concurrency. An argument of 0 means "not specified".
int resolve_threads(int requested = 0);

/// Runs fn(i) for i in [0, n). Work is split into contiguous chunks, one
/// worker per chunk; fn must only write to per-index state so results do
/// not depend on the worker count.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn,
                  int threads = 0);

}  // namespace dictid
