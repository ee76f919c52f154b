#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>
#include <vector>

#include "parallel.hpp"

using steer::ThreadPool;
using steer::resolve_thread_count;

namespace {

// Counts how many times each index in [0, n) is visited.
std::vector<int> visit_counts(ThreadPool& pool, std::size_t n) {
  std::vector<std::atomic<int>> hits(n);
  for (auto& h : hits) h.store(0);
  pool.for_range(n, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) hits[i].fetch_add(1);
  });
  std::vector<int> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = hits[i].load();
  return out;
}

}  // namespace

TEST_CASE("for_range covers every index exactly once") {
  for (int threads : {1, 2, 4, 8}) {
    ThreadPool pool(threads);
    for (std::size_t n : {std::size_t{0}, std::size_t{1}, std::size_t{100},
                          ThreadPool::kInlineBelow + 1, std::size_t{100000}}) {
      const auto hits = visit_counts(pool, n);
      for (std::size_t i = 0; i < n; ++i) CHECK(hits[i] == 1);
    }
  }
}

TEST_CASE("small ranges run inline on the calling thread") {
  ThreadPool pool(8);
  const auto caller = std::this_thread::get_id();
  std::set<std::thread::id> seen;
  pool.for_range(ThreadPool::kInlineBelow - 1, [&](std::size_t, std::size_t) {
    seen.insert(std::this_thread::get_id());
  });
  REQUIRE(seen.size() == 1);
  CHECK(*seen.begin() == caller);
}

TEST_CASE("large ranges actually use the workers") {
  ThreadPool pool(4);
  std::size_t distinct = 0;
  // Scheduling-dependent: workers may lose the race for every chunk on a
  // loaded machine, so accept any attempt that shows parallelism.
  for (int attempt = 0; attempt < 5 && distinct <= 1; ++attempt) {
    std::mutex m;
    std::set<std::thread::id> seen;
    pool.for_range(1 << 21, [&](std::size_t lo, std::size_t hi) {
      volatile double sink = 0;
      for (std::size_t i = lo; i < hi; ++i) sink = sink + 1.0;
      std::lock_guard<std::mutex> lock(m);
      seen.insert(std::this_thread::get_id());
    });
    distinct = seen.size();
  }
  CHECK(distinct > 1);
}

TEST_CASE("for_items dispatches even tiny counts and visits each item once") {
  ThreadPool pool(4);
  const std::size_t n = 10;
  std::size_t distinct = 0;
  for (int attempt = 0; attempt < 5; ++attempt) {
    std::vector<std::atomic<int>> hits(n);
    for (auto& h : hits) h.store(0);
    std::mutex m;
    std::set<std::thread::id> seen;
    pool.for_items(n, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        hits[i].fetch_add(1);
        volatile double sink = 0;
        for (int k = 0; k < 500000; ++k) sink = sink + 1.0;
      }
      std::lock_guard<std::mutex> lock(m);
      seen.insert(std::this_thread::get_id());
    });
    for (std::size_t i = 0; i < n; ++i) CHECK(hits[i].load() == 1);
    distinct = std::max(distinct, seen.size());
    if (distinct > 1) break;
  }
  // Ten slow items across four threads: more than one thread participates.
  CHECK(distinct > 1);
}

TEST_CASE("for_items with a single item runs inline") {
  ThreadPool pool(4);
  const auto caller = std::this_thread::get_id();
  std::thread::id ran_on;
  pool.for_items(1, [&](std::size_t lo, std::size_t hi) {
    CHECK(lo == 0);
    CHECK(hi == 1);
    ran_on = std::this_thread::get_id();
  });
  CHECK(ran_on == caller);
}

TEST_CASE("pool can be reused across many generations") {
  ThreadPool pool(3);
  std::atomic<long long> total{0};
  for (int round = 0; round < 50; ++round) {
    pool.for_range(20000, [&](std::size_t lo, std::size_t hi) {
      long long local = 0;
      for (std::size_t i = lo; i < hi; ++i) local += static_cast<long long>(i);
      total.fetch_add(local);
    });
  }
  const long long expect = 50LL * (20000LL * 19999LL / 2);
  CHECK(total.load() == expect);
}

TEST_CASE("thread_count reports the full worker complement") {
  CHECK(ThreadPool(1).thread_count() == 1);
  CHECK(ThreadPool(4).thread_count() == 4);
  CHECK(ThreadPool(0).thread_count() >= 1);
}

TEST_CASE("resolve_thread_count clamps to at least one") {
  CHECK(resolve_thread_count(1) == 1);
  CHECK(resolve_thread_count(6) == 6);
  CHECK(resolve_thread_count(0) >= 1);
  CHECK(resolve_thread_count(-3) >= 1);
}

TEST_CASE("concurrent pools do not interfere") {
  ThreadPool a(2);
  ThreadPool b(2);
  std::vector<long long> sums(2, 0);
  std::thread ta([&] {
    std::atomic<long long> s{0};
    a.for_range(100000, [&](std::size_t lo, std::size_t hi) {
      long long local = 0;
      for (std::size_t i = lo; i < hi; ++i) local += 1;
      s.fetch_add(local);
    });
    sums[0] = s.load();
  });
  std::thread tb([&] {
    std::atomic<long long> s{0};
    b.for_range(100000, [&](std::size_t lo, std::size_t hi) {
      long long local = 0;
      for (std::size_t i = lo; i < hi; ++i) local += 1;
      s.fetch_add(local);
    });
    sums[1] = s.load();
  });
  ta.join();
  tb.join();
  CHECK(sums[0] == 100000);
  CHECK(sums[1] == 100000);
}
