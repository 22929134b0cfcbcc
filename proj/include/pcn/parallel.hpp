#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pcn {

/// Thread count from PCN_THREADS, or 1.
inline unsigned default_threads() {
  if (const char* s = std::getenv("PCN_THREADS")) {
    int t = std::atoi(s);
    if (t > 0) return static_cast<unsigned>(t);
  }
  return 1;
}

/// Runs work(i) for every i in [0, count) on up to threads workers. Results
/// must be written to per-index slots so that merging is order independent.
template <typename Work>
void parallel_for(std::uint64_t count, unsigned threads, Work&& work) {
  threads = std::max(1u, threads);
  if (threads == 1 || count <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) work(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  const auto workers = static_cast<unsigned>(std::min<std::uint64_t>(threads, count));
  for (unsigned t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (auto i = next++; i < count; i = next++) {
        try {
          work(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace pcn
