/*
 * Copyright 2026 The Nightforge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nightforge {

namespace detail {

inline int default_thread_count() {
  if (const char* env = std::getenv("NIGHTFORGE_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

inline std::atomic<int>& thread_cap() {
  static std::atomic<int> cap{default_thread_count()};
  return cap;
}

inline bool& inside_worker() {
  thread_local bool flag = false;
  return flag;
}

}  // namespace detail

/// Caps the number of worker threads used by parallel_for. Values < 1 reset to
/// the default (NIGHTFORGE_THREADS or the hardware concurrency).
inline void set_thread_count(int n) {
  detail::thread_cap().store(n > 0 ? n : detail::default_thread_count());
}

inline int thread_count() { return detail::thread_cap().load(); }

// Runs fn(i) for i in [begin, end). Work is split into contiguous blocks; a
// nested call from inside a worker runs serially. Results must not depend on
// the split, so callers only write disjoint outputs.
template <typename Fn>
void parallel_for(std::size_t begin, std::size_t end, Fn&& fn) {
  if (end <= begin) return;
  const std::size_t n = end - begin;
  const std::size_t workers =
      detail::inside_worker() ? 1 : std::min<std::size_t>(n, static_cast<std::size_t>(thread_count()));
  if (workers <= 1) {
    for (std::size_t i = begin; i < end; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{begin};
  const std::size_t grain = std::max<std::size_t>(1, n / (workers * 8));
  std::exception_ptr error;
  std::mutex error_mutex;

  auto work = [&] {
    detail::inside_worker() = true;
    try {
      for (;;) {
        const std::size_t lo = next.fetch_add(grain);
        if (lo >= end) break;
        const std::size_t hi = std::min(end, lo + grain);
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      next.store(end);
    }
    detail::inside_worker() = false;
  };

  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace nightforge
