#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace kstab {

namespace detail {

inline bool& inside_worker() {
  thread_local bool flag = false;
  return flag;
}

}  // namespace detail

/// Evaluates fn(0..n-1) on a small worker pool and returns the results in
/// index order. If items throw, the exception of the lowest index is rethrown,
/// so failures are as deterministic as results. Calls made from inside a
/// worker run serially instead of spawning a nested pool.
template <class Fn>
auto parallel_map(std::size_t n, Fn fn, unsigned max_workers = 0) -> std::vector<decltype(fn(std::size_t{}))> {
  using R = decltype(fn(std::size_t{}));
  std::vector<R> out(n);
  if (n == 0) return out;
  bool& inside_worker = detail::inside_worker();
  unsigned workers = inside_worker ? 1u : max_workers ? max_workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> failures(n);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      detail::inside_worker() = true;
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          out[i] = fn(i);
        } catch (...) {
          failures[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);
  return out;
}

}  // namespace kstab
