#pragma once

#include <cstddef>
#include <functional>

namespace fracnelson::core {

/// Worker count: FRACNELSON_THREADS when set (>= 1), otherwise hardware concurrency.
std::size_t thread_count();

/// Runs body(begin, end) over contiguous chunks of [0, n). Chunk boundaries only
/// depend on n and the thread count; results written per index are therefore
/// independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace fracnelson::core
