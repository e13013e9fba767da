#pragma once
#include <functional>

namespace ghostsim {

/// Effective worker count: `requested` if > 0, else the GHOSTSIM_THREADS
/// environment cap, else hardware concurrency.
int effective_threads(int requested = 0);

/// Runs fn(begin, end) over a static block partition of [0, count using
/// `threads` workers. Each block writes disjoint outputs and the partition
/// does not depend on scheduling, so results are byte-identical for any
/// thread count.
void parallel_blocks(int count, int threads, const std::function<void(int, int)>& fn);

}  // namespace ghostsim
