#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace pef::detail {

// Calls body(k) for k in [0, count) on up to `workers` threads. Each index
// runs exactly once; the exception thrown for the lowest failing index (if
// any) is rethrown after all threads join.
template <typename Body>
void parallel_for(int count, int workers, Body body) {
  workers = std::clamp(workers, 1, std::max(1, count));
  std::vector<std::exception_ptr> errors(std::max(0, count));
  if (workers == 1) {
    for (int k = 0; k < count; ++k) {
      try {
        body(k);
      } catch (...) {
        errors[k] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    {
      std::vector<std::jthread> pool;
      pool.reserve(workers);
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          for (int k = next++; k < count && !failed; k = next++) {
            try {
              body(k);
            } catch (...) {
              errors[k] = std::current_exception();
              failed = true;
            }
          }
        });
      }
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace pef::detail
