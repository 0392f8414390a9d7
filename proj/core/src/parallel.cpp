// Copyright 2026 The pfcam Authors
// SPDX-License-Identifier: Apache-2.0

#include "pfcam/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pfcam {
namespace {
std::atomic<unsigned> g_threads{0};
// Nested calls run inline on the worker that issued them.
thread_local bool t_in_parallel = false;
}

void set_thread_count(unsigned n) { g_threads.store(n); }

unsigned thread_count() {
  const unsigned n = g_threads.load();
  if (n != 0) return n;
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_rows(int rows, const std::function<void(int)>& body) {
  if (rows <= 0) return;
  const int workers = static_cast<int>(std::min<unsigned>(thread_count(), static_cast<unsigned>(rows)));
  if (workers <= 1 || t_in_parallel) {
    for (int r = 0; r < rows; ++r) body(r);
    return;
  }

  std::exception_ptr error;
  std::mutex error_mu;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      const int begin = rows * w / workers;
      const int end = rows * (w + 1) / workers;
      pool.emplace_back([&, begin, end] {
        t_in_parallel = true;
        try {
          for (int r = begin; r < end; ++r) body(r);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!error) error = std::current_exception();
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace pfcam
