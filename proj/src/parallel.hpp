#pragma once

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace steer {

using RangeFn = std::function<void(std::size_t, std::size_t)>;

// Persistent worker pool dispatching contiguous index ranges. Every per-index
// result must be a pure function of that index and the shared inputs, so the
// output is bit-identical for any thread count or chunking — the numeric
// kernels rely on this for reproducibility.
class ThreadPool {
 public:
  // threads <= 0 selects the hardware concurrency.
  explicit ThreadPool(int threads = 1);
  ~ThreadPool();
  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  int thread_count() const { return static_cast<int>(workers_.size()) + 1; }

  // Runs fn over a partition of [0, n); blocks until every chunk is done.
  void for_range(std::size_t n, const RangeFn& fn);

  // Like for_range, but for coarse items (whole solves, not vector entries):
  // dispatches to the workers whenever there is more than one item, in chunks
  // of `grain`. fn must not touch this pool — nested dispatch would deadlock.
  void for_items(std::size_t n, const RangeFn& fn, std::size_t grain = 1);

  // Dispatch overhead dominates below this size; such calls run inline.
  static constexpr std::size_t kInlineBelow = 4096;

 private:
  void worker_loop();
  void run_chunks();
  void dispatch(std::size_t n, const RangeFn& fn, std::size_t chunk);

  std::vector<std::thread> workers_;
  std::mutex mutex_;
  std::condition_variable cv_start_;
  std::condition_variable cv_done_;
  std::uint64_t generation_ = 0;
  std::size_t busy_ = 0;
  bool stop_ = false;

  const RangeFn* fn_ = nullptr;
  std::size_t n_ = 0;
  std::size_t chunk_ = 0;
  std::size_t num_chunks_ = 0;
  std::atomic<std::size_t> next_chunk_{0};
};

int resolve_thread_count(int requested);

}  // namespace steer
