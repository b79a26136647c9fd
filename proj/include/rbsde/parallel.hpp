#pragma once

#include <cstddef>
#include <functional>

// Deterministic parallelism. Work is split into fixed-size chunks whose
// outputs are disjoint, and reductions combine fixed-size block sums in block
// order, so results are bitwise independent of the thread count.

namespace rbsde {

int thread_count();
void set_thread_count(int n);  // n >= 1; values < 1 reset to 1

// fn(begin, end) over disjoint subranges of [0, n).
void parallel_for(std::size_t n, std::size_t grain,
                  const std::function<void(std::size_t, std::size_t)>& fn);

// Block-structured reductions (block size fixed, independent of threads).
double block_sum(const double* x, std::size_t n);
double block_dot(const double* w, const double* x, std::size_t n);

}  // namespace rbsde
