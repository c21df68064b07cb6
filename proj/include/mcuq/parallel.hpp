#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace mcuq {

inline unsigned resolve_thread_count(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

/// Runs body(begin, end) over contiguous chunks of [0, count). Chunk boundaries
/// depend only on count and the thread cap, so callers that write per-chunk
/// outputs and concatenate them in chunk order stay deterministic.
template <class Body>
void parallel_chunks(std::size_t count, unsigned threads, Body&& body) {
  const std::size_t workers = std::min<std::size_t>(resolve_thread_count(threads), std::max<std::size_t>(count, 1));
  if (workers <= 1 || count < 2) {
    body(std::size_t{0}, count, std::size_t{0});
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const std::size_t step = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * step;
    const std::size_t end = std::min(count, begin + step);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end, w] {
      try {
        body(begin, end, w);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

/// Number of chunks parallel_chunks will use for the given arguments.
inline std::size_t chunk_count(std::size_t count, unsigned threads) {
  const std::size_t workers = std::min<std::size_t>(resolve_thread_count(threads), std::max<std::size_t>(count, 1));
  if (workers <= 1 || count < 2) return 1;
  const std::size_t step = (count + workers - 1) / workers;
  return (count + step - 1) / step;
}

}  // namespace mcuq
