#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace qsafe {

// Runs fn(index) for every index in [0, count) on `jobs` threads pulling from
// a shared counter. The first exception wins and is rethrown after join;
// setting *cancel stops the dispatch loop early.
inline void parallel_for(std::uint64_t count, int jobs,
                         const std::function<void(std::uint64_t)>& fn,
                         std::atomic<bool>* cancel = nullptr) {
  if (jobs < 1) jobs = 1;
  if (count == 0) return;
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed) &&
           !(cancel && cancel->load(std::memory_order_relaxed))) {
      std::uint64_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) break;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        break;
      }
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(jobs);
    for (int t = 0; t < jobs; ++t) threads.emplace_back(worker);
    for (auto& th : threads) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace qsafe
