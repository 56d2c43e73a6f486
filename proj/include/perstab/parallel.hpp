#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace perstab {

// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
// visited exactly once; callers write into preallocated slots so the result
// does not depend on scheduling. The first exception (lowest index) is rethrown.
template <typename Body>
void parallel_for(std::size_t count, int threads, Body&& body) {
  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::mutex mu;
  std::exception_ptr first;
  std::size_t first_index = count;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < count; i += workers) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(mu);
            if (i < first_index) {
              first_index = i;
              first = std::current_exception();
            }
          }
        }
      });
    }
  }
  if (first) std::rethrow_exception(first);
}

}  // namespace perstab
