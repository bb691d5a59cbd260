#pragma once

#include <cstddef>
#include <functional>

namespace gmt {

/// Worker count: GMTKIT_THREADS if set and positive, else hardware concurrency.
[[nodiscard]] unsigned worker_count();

/// Runs body(begin, end) over contiguous chunks of [0, n). Each index is
/// visited exactly once, so results are independent of the thread count as
/// long as body writes only to its own indices.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace gmt
