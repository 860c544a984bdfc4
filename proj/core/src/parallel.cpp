#include "mvem/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace mvem {

int thread_count() {
  if (const char* s = std::getenv("MVEM_THREADS")) {
    try {
      int n = std::stoi(s);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int threads) {
  if (threads <= 0) threads = thread_count();
  threads = static_cast<int>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  const std::size_t chunk = std::max<std::size_t>(1, n / (8 * threads));
  auto work = [&] {
    for (;;) {
      std::size_t b = next.fetch_add(chunk);
      if (b >= n) return;
      std::size_t e = std::min(n, b + chunk);
      try {
        for (std::size_t i = b; i < e; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!err) err = std::current_exception();
        next = n;
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace mvem
