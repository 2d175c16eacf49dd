#pragma once

#include <cstddef>
#include <functional>

namespace steincmp {

/// Worker cap: STEINCMP_THREADS if set to a positive integer, else hardware concurrency.
std::size_t worker_count();

/// Runs body(i) for i in [0, n) over contiguous static chunks. Calls from inside another
/// parallel_for run serially, so nesting never oversubscribes.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t workers = 0);

}  // namespace steincmp
