// Trial-level parallelism. Work items are independent and written to
// caller-owned slots indexed by item, so any later reduction can run in a
// fixed order regardless of scheduling.
#pragma once

#include <cstddef>
#include <functional>

namespace stochlr::parallel {

// Thread budget: min(hardware, STOCHLR_THREADS if set). At least 1.
unsigned thread_cap();

// Runs fn(0..count-1) on up to thread_cap() threads. The first exception, if
// any, is rethrown on the calling thread after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace stochlr::parallel
