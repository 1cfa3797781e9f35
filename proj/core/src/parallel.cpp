#include "qgraph/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace qgraph {

int worker_count() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("QGRAPH_THREADS")) {
    try {
      int cap = std::stoi(env);
      if (cap >= 1) hw = std::min(hw, cap);
    } catch (...) {
      // ignore malformed values, keep the hardware default
    }
  }
  return hw;
}

namespace {
thread_local bool inside_parallel_region = false;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const int workers = worker_count();
  if (n == 0) return;
  if (workers == 1 || n == 1 || inside_parallel_region) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto body = [&]() {
    inside_parallel_region = true;
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      fn(i);
    }
    inside_parallel_region = false;
  };
  std::vector<std::thread> pool;
  const std::size_t spawn = std::min<std::size_t>(workers, n);
  pool.reserve(spawn);
  for (std::size_t t = 1; t < spawn; ++t) pool.emplace_back(body);
  body();
  for (auto& th : pool) th.join();
}

}  // namespace qgraph
