#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace otlab {

/// Number of worker threads for a request of `threads` (0 means all cores).
inline unsigned resolve_threads(int threads) {
  if (threads > 0) return static_cast<unsigned>(threads);
  return std::max(1U, std::thread::hardware_concurrency());
}

/// Calls body(i) for i in [0, count) on up to `threads` workers. Callers
/// write results into slot i and reduce afterwards in index order, which
/// keeps every reported number independent of the thread count. If bodies
/// throw, the exception of the smallest index is rethrown.
template <class Body>
void parallel_for(std::size_t count, int threads, Body&& body) {
  const unsigned workers = std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(count, 1));
  std::atomic<std::size_t> next{0};
  std::mutex guard;
  std::size_t failed_index = count;
  std::exception_ptr failure;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(guard);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace otlab
