#pragma once

#include <cstddef>
#include <functional>

namespace depol {

// Thread cap: min(DEPOL_THREADS, hardware_concurrency), at least 1.
int max_threads();

// Static index-partitioned parallel loop. Workers write only to their own
// output slots, so results are identical for any thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace depol
