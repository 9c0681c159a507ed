#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace mregen {

// Run all jobs on up to `workers` threads. Jobs write their results into
// caller-owned slots indexed by job, so completion order never matters.
inline void run_jobs(std::vector<std::function<void()>>& jobs, int workers) {
  if (jobs.empty()) return;
  if (workers <= 1 || jobs.size() == 1) {
    for (auto& job : jobs) job();
    return;
  }
  std::atomic<std::size_t> next{0};
  auto drain = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      jobs[i]();
    }
  };
  const int n = std::min<int>(workers, static_cast<int>(jobs.size()));
  std::vector<std::thread> pool;
  pool.reserve(n - 1);
  for (int i = 0; i < n - 1; ++i) pool.emplace_back(drain);
  drain();
  for (auto& th : pool) th.join();
}

}  // namespace mregen
