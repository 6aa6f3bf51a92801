#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace dtil::parallel {

/// Worker count used by parallel_for. Initialised from DTIL_THREADS
/// (default: hardware concurrency); set_thread_count overrides it.
int thread_count();
void set_thread_count(int n);

/// Runs body(begin, end) over disjoint contiguous chunks of [0, n).
/// Chunk boundaries never influence results: callers write only to
/// per-index outputs.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body);

/// Fixed-order sum. The reduction tree depends only on values.size(),
/// so the result is bit-identical for any thread count.
double deterministic_sum(std::span<const double> values);

}  // namespace dtil::parallel
