#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

namespace multcorr {

// Worker-pool size: explicit setting wins, then MULTCORR_THREADS, then
// hardware concurrency.  0 means "auto".
void set_thread_count(int n);
int thread_count();

// Default chunk length for parallel range scans.  Chunk boundaries are a
// function of the range alone, never of the worker count, so every reduction
// below is bit-reproducible for any --threads value.
inline constexpr std::uint64_t kScanChunk = std::uint64_t{1} << 18;

// Map `work` over fixed chunks of the inclusive range [lo, hi] concurrently,
// then fold the per-chunk results strictly in ascending chunk order.
template <class R, class Work, class Fold>
void parallel_chunks(std::uint64_t lo, std::uint64_t hi, std::uint64_t chunk,
                     Work&& work, Fold&& fold) {
  if (hi < lo) return;
  if (chunk == 0) chunk = kScanChunk;
  const std::uint64_t n_chunks = (hi - lo) / chunk + 1;
  std::vector<R> results(static_cast<std::size_t>(n_chunks));

  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto run = [&] {
    for (;;) {
      const std::uint64_t i = next.fetch_add(1);
      if (i >= n_chunks || failed.load(std::memory_order_relaxed)) break;
      const std::uint64_t a = lo + i * chunk;
      const std::uint64_t b = std::min(hi, a + chunk - 1);
      try {
        results[static_cast<std::size_t>(i)] = work(a, b);
      } catch (...) {
        std::lock_guard<std::mutex> g(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        break;
      }
    }
  };

  const int workers = static_cast<int>(
      std::min<std::uint64_t>(n_chunks, static_cast<std::uint64_t>(thread_count())));
  if (workers <= 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(run);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  for (std::uint64_t i = 0; i < n_chunks; ++i) {
    fold(std::move(results[static_cast<std::size_t>(i)]));
  }
}

}  // namespace multcorr
