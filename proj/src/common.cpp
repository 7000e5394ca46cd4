#include "w2d/common.hpp"

#include <atomic>
#include <thread>
#include <vector>

namespace w2d {

namespace {
std::atomic<int> g_threads{1};
}

void set_worker_threads(int k) { g_threads = std::max(1, k); }
int worker_threads() { return g_threads.load(); }

void parallel_for(long n, const std::function<void(long)>& f) {
  int k = std::min<long>(g_threads.load(), n);
  if (k <= 1) {
    for (long i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(k);
  for (int t = 0; t < k; ++t) {
    long lo = n * t / k, hi = n * (t + 1) / k;
    pool.emplace_back([&, lo, hi] {
      for (long i = lo; i < hi; ++i) f(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace w2d
