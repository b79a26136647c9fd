#pragma once

#include <cmath>

#include "rbsde/random_time.hpp"
#include "rbsde/rng.hpp"

namespace rbsde::testing {

// Two-step reference kernel used across the suites (depth 2, dt 1):
// alpha_0 = 0; alpha_1 = 0.25 if the second step is up else 0.5;
// alpha_2 = 0.25; the rest survives beyond the tree. The finite variant moves
// the surviving mass onto alpha_2.
inline DensityKernel reference_kernel(bool finite = false) {
  DensityKernel k;
  k.depth = 2;
  k.finite_tau = finite;
  k.alpha.assign(4 * 4, 0.0);
  for (std::uint64_t leaf = 0; leaf < 4; ++leaf) {
    const bool second_up = (leaf & 1) != 0;
    k.entry(leaf, 0) = 0.0;
    k.entry(leaf, 1) = second_up ? 0.25 : 0.5;
    k.entry(leaf, 2) = 0.25;
    k.entry(leaf, 3) = second_up ? 0.5 : 0.25;
    if (finite) {
      k.entry(leaf, 2) += k.entry(leaf, 3);
      k.entry(leaf, 3) = 0.0;
    }
  }
  return k;
}

// Seeded random kernel with strictly positive masses (so survival stays
// positive everywhere); exponential weights per leaf make it anticipative.
inline DensityKernel random_kernel(int depth, std::uint64_t seed, bool finite,
                                   bool with_time0_mass = false) {
  DensityKernel k;
  k.depth = depth;
  k.finite_tau = finite;
  const std::size_t leaves = std::size_t{1} << depth;
  k.alpha.assign(leaves * (depth + 2), 0.0);
  Rng rng(seed);
  for (std::size_t w = 0; w < leaves; ++w) {
    double total = 0.0;
    for (int j = 0; j <= depth + 1; ++j) {
      double g = rng.exponential();
      if (j == 0 && !with_time0_mass) g = 0.0;
      if (j == depth + 1) g = finite ? 0.0 : g + 0.5;
      k.entry(w, j) = g;
      total += g;
    }
    for (int j = 0; j <= depth + 1; ++j) k.entry(w, j) /= total;
  }
  return k;
}

// Cox kernel: hazard depends on the current node only, so the enlargement
// is immersive (m constant, Ztilde = 1).
inline DensityKernel cox_kernel(int depth, double dt, bool finite, double base = 0.15,
                                double slope = 0.1) {
  DensityKernel k;
  k.depth = depth;
  k.finite_tau = finite;
  const std::size_t leaves = std::size_t{1} << depth;
  k.alpha.assign(leaves * (depth + 2), 0.0);
  TreeModel tree = TreeModel::build(depth, dt);
  for (std::size_t w = 0; w < leaves; ++w) {
    double surv = 1.0;
    for (int n = 0; n <= depth; ++n) {
      double lam = base + slope * (tree.brownian(n, TreeModel::prefix(w, depth, n)) > 0.0);
      if (finite && n == depth) lam = 1.0;
      k.entry(w, n) = surv * lam;
      surv *= 1.0 - lam;
    }
    k.entry(w, depth + 1) = surv;
  }
  return k;
}

// Anticipative tilt of a flat hazard: the step-n hazard looks at the sign of
// the next Brownian increment.
inline DensityKernel anticipative_kernel(int depth, std::uint64_t seed, bool finite,
                                         double base = 0.25, double mix = 0.5) {
  DensityKernel k;
  k.depth = depth;
  k.finite_tau = finite;
  const std::size_t leaves = std::size_t{1} << depth;
  k.alpha.assign(leaves * (depth + 2), 0.0);
  Rng rng(seed);
  const double jitter = 0.05 * rng.uniform();
  for (std::size_t w = 0; w < leaves; ++w) {
    double surv = 1.0;
    for (int n = 0; n <= depth; ++n) {
      double lam = base + jitter;
      if (n < depth) {
        const int sign = TreeModel::step_sign(TreeModel::prefix(w, depth, n + 1));
        lam *= 1.0 + mix * sign;
      }
      if (finite && n == depth) lam = 1.0;
      k.entry(w, n) = surv * lam;
      surv *= 1.0 - lam;
    }
    k.entry(w, depth + 1) = surv;
  }
  return k;
}

}  // namespace rbsde::testing
