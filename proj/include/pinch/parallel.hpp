#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pinch {

/// Splits [0, n) into chunks of `chunk_size` and runs `fn(begin, end, chunk_id, worker)` on up to
/// `workers` threads, where `worker` < worker_slots(n, workers, chunk_size) identifies the calling
/// thread. Chunk boundaries depend only on n and chunk_size, never on the worker count, so callers
/// that merge per-chunk results in chunk order (or per-worker results with a commutative merge)
/// stay deterministic.
template <class Fn>
void parallel_chunks(std::size_t n, unsigned workers, std::size_t chunk_size, Fn&& fn) {
  if (n == 0) return;
  chunk_size = std::max<std::size_t>(chunk_size, 1);
  const std::size_t chunks = (n + chunk_size - 1) / chunk_size;
  const unsigned threads = static_cast<unsigned>(std::clamp<std::size_t>(workers, 1, chunks));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&](unsigned worker) {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= chunks) return;
      try {
        const std::size_t begin = c * chunk_size;
        fn(begin, std::min(n, begin + chunk_size), c, worker);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(chunks);
        return;
      }
    }
  };

  if (threads == 1) {
    body(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(body, t);
  }
  if (failure) std::rethrow_exception(failure);
}

/// Number of distinct `worker` values parallel_chunks may pass.
inline unsigned worker_slots(std::size_t n, unsigned workers, std::size_t chunk_size) {
  chunk_size = std::max<std::size_t>(chunk_size, 1);
  const std::size_t chunks = (n + chunk_size - 1) / chunk_size;
  return static_cast<unsigned>(std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(chunks, 1)));
}

inline std::size_t chunk_count(std::size_t n, std::size_t chunk_size) {
  return n == 0 ? 0 : (n + chunk_size - 1) / chunk_size;
}

}  // namespace pinch
