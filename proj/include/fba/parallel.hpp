#pragma once

#include <cstdint>
#include <functional>

namespace fba {

// Global worker count used by parallel_for. Defaults to hardware concurrency.
int thread_count();
void set_thread_count(int n);

// Runs fn(i) for i in [begin, end) split into contiguous blocks, one per
// worker. Callers must write only to per-index slots so that results are
// independent of the worker count.
void parallel_for(std::int64_t begin, std::int64_t end,
                  const std::function<void(std::int64_t)>& fn);

}  // namespace fba
