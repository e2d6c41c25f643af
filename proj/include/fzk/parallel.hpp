#pragma once

#include <cstddef>
#include <functional>

namespace fzk {

// Worker cap: FZK_THREADS if set to a positive integer, else hardware concurrency.
int thread_count();

// Run body(begin, end) over [0, n) split into contiguous chunks.
// Chunk boundaries depend only on n and the thread cap, so results are reproducible.
// Runs serially when n < serial_below.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t serial_below = 4096);

} // namespace fzk
