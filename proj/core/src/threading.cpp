#include "ghostsim/threading.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace ghostsim {

int effective_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("GHOSTSIM_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) return t;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_blocks(int count, int threads, const std::function<void(int, int)>& fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    fn(0, count);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const int base = count / threads;
  const int extra = count % threads;
  int begin = 0;
  for (int t = 0; t < threads; ++t) {
    const int len = base + (t < extra ? 1 : 0);
    pool.emplace_back(fn, begin, begin + len);
    begin += len;
  }
  for (std::thread& th : pool) th.join();
}

}  // namespace ghostsim
