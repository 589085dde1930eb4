#ifndef MKMMD_PARALLEL_HPP
#define MKMMD_PARALLEL_HPP

#include "mkmmd/types.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mkmmd {

/// Process-wide cap on worker threads (1 = run inline).
inline std::atomic<int>& thread_limit() {
  static std::atomic<int> limit{1};
  return limit;
}

/**
 * Runs body(i) for i in [0, count). Each index must write only its own output
 * slot; results are then independent of the schedule.
 */
template <typename Body>
void parallel_for(Index count, Body&& body) {
  const int workers = static_cast<int>(std::min<Index>(std::max(1, thread_limit().load()), count));
  if (workers <= 1) {
    for (Index i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<Index> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (Index i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace mkmmd

#endif  // MKMMD_PARALLEL_HPP
