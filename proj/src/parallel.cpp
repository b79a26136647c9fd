#include "rbsde/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

#include "rbsde/kernels.hpp"

namespace rbsde {

namespace {

constexpr std::size_t kBlock = 4096;

int initial_threads() {
  if (const char* env = std::getenv("RBSDE_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

int& threads_ref() {
  static int n = initial_threads();
  return n;
}

}  // namespace

int thread_count() { return threads_ref(); }

void set_thread_count(int n) { threads_ref() = std::max(1, n); }

void parallel_for(std::size_t n, std::size_t grain,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  grain = std::max<std::size_t>(1, grain);
  const std::size_t nchunks = (n + grain - 1) / grain;
  const int workers = std::min<std::size_t>(threads_ref(), nchunks);
  if (workers <= 1) {
    fn(0, n);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (;;) {
      std::size_t c = next.fetch_add(1);
      if (c >= nchunks) return;
      std::size_t b = c * grain;
      fn(b, std::min(n, b + grain));
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int i = 1; i < workers; ++i) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
}

double block_sum(const double* x, std::size_t n) {
  if (n <= kBlock) return kernels::sum(x, n);
  const std::size_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(nblocks);
  parallel_for(nblocks, 8, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      std::size_t lo = i * kBlock;
      partial[i] = kernels::sum(x + lo, std::min(n, lo + kBlock) - lo);
    }
  });
  return kernels::sum(partial.data(), nblocks);
}

double block_dot(const double* w, const double* x, std::size_t n) {
  if (n <= kBlock) return kernels::dot(w, x, n);
  const std::size_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(nblocks);
  parallel_for(nblocks, 8, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      std::size_t lo = i * kBlock;
      partial[i] = kernels::dot(w + lo, x + lo, std::min(n, lo + kBlock) - lo);
    }
  });
  return kernels::sum(partial.data(), nblocks);
}

}  // namespace rbsde
