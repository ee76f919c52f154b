#include "parallel.hpp"

#include <algorithm>

namespace steer {

int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

ThreadPool::ThreadPool(int threads) {
  const int count = resolve_thread_count(threads);
  workers_.reserve(static_cast<std::size_t>(count > 1 ? count - 1 : 0));
  for (int i = 1; i < count; ++i) {
    workers_.emplace_back([this] { worker_loop(); });
  }
}

ThreadPool::~ThreadPool() {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    stop_ = true;
  }
  cv_start_.notify_all();
  for (auto& w : workers_) w.join();
}

void ThreadPool::for_range(std::size_t n, const RangeFn& fn) {
  if (n == 0) return;
  if (workers_.empty() || n < kInlineBelow) {
    fn(0, n);
    return;
  }
  dispatch(n, fn, std::max<std::size_t>(512, n / (workers_.size() + 1) / 4));
}

void ThreadPool::for_items(std::size_t n, const RangeFn& fn, std::size_t grain) {
  if (n == 0) return;
  if (workers_.empty() || n == 1) {
    fn(0, n);
    return;
  }
  dispatch(n, fn, std::max<std::size_t>(1, grain));
}

void ThreadPool::dispatch(std::size_t n, const RangeFn& fn, std::size_t chunk) {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    fn_ = &fn;
    n_ = n;
    chunk_ = chunk;
    num_chunks_ = (n + chunk_ - 1) / chunk_;
    next_chunk_.store(0, std::memory_order_relaxed);
    busy_ = workers_.size();
    ++generation_;
  }
  cv_start_.notify_all();
  run_chunks();  // the calling thread takes part
  std::unique_lock<std::mutex> lock(mutex_);
  cv_done_.wait(lock, [this] { return busy_ == 0; });
  fn_ = nullptr;
}

void ThreadPool::run_chunks() {
  for (;;) {
    const std::size_t c = next_chunk_.fetch_add(1, std::memory_order_relaxed);
    if (c >= num_chunks_) return;
    const std::size_t begin = c * chunk_;
    (*fn_)(begin, std::min(n_, begin + chunk_));
  }
}

void ThreadPool::worker_loop() {
  std::uint64_t seen = 0;
  for (;;) {
    {
      std::unique_lock<std::mutex> lock(mutex_);
      cv_start_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
    }
    run_chunks();
    {
      std::lock_guard<std::mutex> lock(mutex_);
      if (--busy_ == 0) cv_done_.notify_all();
    }
  }
}

}  // namespace steer
