#ifndef LRP_POOL_HPP
#define LRP_POOL_HPP

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

#include "lrp/check.hpp"

namespace lrp {

// Runs fn(0), ..., fn(count - 1) across a worker pool.  Each index is
// dispatched exactly once via an atomic ticket, so results written to
// index-addressed slots are identical for any worker count; folding those
// slots in index order keeps aggregates byte-stable.  The first exception
// thrown by any worker is rethrown after the pool drains.
inline void run_indexed(std::int64_t count, int workers,
                        const std::function<void(std::int64_t)>& fn) {
  LRP_REQUIRE(count >= 0, "run_indexed: negative count");
  LRP_REQUIRE(workers >= 1, "run_indexed: need a worker");
  if (count == 0) return;
  if (workers == 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> ticket{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::atomic_flag error_claim = ATOMIC_FLAG_INIT;
  auto work = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::int64_t i = ticket.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        if (!error_claim.test_and_set()) first_error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (int w = 0; w < workers; ++w) threads.emplace_back(work);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace lrp

#endif
