#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "rbsde/errors.hpp"

// Non-recombining binary lattice carrying the Brownian filtration. A node at
// level n is identified by its first n branch bits packed into an integer,
// most significant bit = first step, bit value 1 = up. Every branch carries
// probability 1/2 and a Brownian increment of +-sqrt(dt).

namespace rbsde {

struct TreeModel {
  static constexpr int kMaxDepth = 22;

  int depth = 0;
  double dt = 1.0;
  double sqrt_dt = 1.0;

  static TreeModel build(int depth, double dt);

  std::size_t nodes(int level) const { return std::size_t{1} << level; }
  std::size_t leaves() const { return nodes(depth); }
  double time(int level) const { return level * dt; }

  // Path prefix of `bits` (a level-m index) at level n <= m.
  static std::uint64_t prefix(std::uint64_t bits, int m, int n) {
    return bits >> (m - n);
  }
  // Increment sign of the step into (level, bits): +1 up, -1 down.
  static int step_sign(std::uint64_t bits) { return (bits & 1u) ? +1 : -1; }

  double brownian(int level, std::uint64_t bits) const {
    return sqrt_dt * (2.0 * static_cast<double>(std::popcount(bits)) - level);
  }
};

// One value per node per level 0..depth; the storage layout enforces that the
// level-n slice depends on the first n branch bits only.
class AdaptedProcess {
 public:
  AdaptedProcess() = default;
  explicit AdaptedProcess(int depth) : depth_(depth), levels_(depth + 1) {
    for (int n = 0; n <= depth; ++n) levels_[n].assign(std::size_t{1} << n, 0.0);
  }

  int depth() const { return depth_; }
  std::span<double> level(int n) { return levels_[n]; }
  std::span<const double> level(int n) const { return levels_[n]; }
  double& at(int n, std::uint64_t bits) { return levels_[n][bits]; }
  double at(int n, std::uint64_t bits) const { return levels_[n][bits]; }

 private:
  int depth_ = -1;
  std::vector<std::vector<double>> levels_;
};

// One value per step k = 1..depth, known one level earlier: the step-k slice
// lives on the 2^(k-1) level-(k-1) nodes.
class PredictableProcess {
 public:
  PredictableProcess() = default;
  explicit PredictableProcess(int depth) : depth_(depth), steps_(depth) {
    for (int k = 1; k <= depth; ++k) steps_[k - 1].assign(std::size_t{1} << (k - 1), 0.0);
  }

  int depth() const { return depth_; }
  std::span<double> step(int k) { return steps_[k - 1]; }
  std::span<const double> step(int k) const { return steps_[k - 1]; }
  double& at(int k, std::uint64_t parent_bits) { return steps_[k - 1][parent_bits]; }
  double at(int k, std::uint64_t parent_bits) const { return steps_[k - 1][parent_bits]; }

 private:
  int depth_ = -1;
  std::vector<std::vector<double>> steps_;
};

// E[X_m | F_n] for a level-m slice, exact pairwise halving (m - n rounds).
std::vector<double> cond_expectation(std::span<const double> values_at_m, int m, int n);

// E[X] over the leaf-level slice = cond_expectation(..., m, 0)[0].
double expectation(std::span<const double> values, int level);

// The Brownian path process W.
AdaptedProcess brownian_process(const TreeModel& tree);

// Integrand Z with M_{n+1} = M_n + Z_n dW_{n+1}, exact on a binary tree.
// Throws ContractError if M fails the one-step martingale check within
// tol_rel * (1 + max |M|).
PredictableProcess martingale_representation(const TreeModel& tree, const AdaptedProcess& M,
                                             double tol_rel = 1e-12);

// Doleans-Dade exponential E(X)_n = prod_{k<=n} (1 + dX_k) for a process with
// X_0 = 0: dx.level(k) holds the jump at step k (k >= 1; level 0 is ignored).
AdaptedProcess doleans_dade(const TreeModel& tree, const AdaptedProcess& dx);

}  // namespace rbsde
