#pragma once

#include <cstdint>
#include <functional>

namespace fouest {

// Worker count: FOUEST_WORKERS environment variable if set, otherwise the
// hardware concurrency.  Always at least 1.
int worker_count();

// Runs fn(i) for i in [0, count).  Each index is processed exactly once; fn
// must write only to per-index slots so the result is independent of worker
// count and scheduling.
void parallel_for(std::int64_t count, const std::function<void(std::int64_t)>& fn);

}  // namespace fouest
