#pragma once

#include <cstdint>
#include <functional>

namespace gmfc {

// Runs fn(i) for every i in [0, count), split statically across `threads`
// workers. Each fn(i) must write only to slots owned by index i; callers
// reduce in index order afterwards, so results do not depend on the thread
// count.
void parallel_for(std::int64_t count, int threads,
                  const std::function<void(std::int64_t)>& fn);

int default_thread_count();

}  // namespace gmfc
