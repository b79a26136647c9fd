#include "rbsde/tree.hpp"

#include <algorithm>
#include <cmath>

#include "rbsde/kernels.hpp"
#include "rbsde/parallel.hpp"

namespace rbsde {

TreeModel TreeModel::build(int depth, double dt) {
  if (depth < 1 || depth > kMaxDepth)
    throw ConfigError("tree depth must be in [1, " + std::to_string(kMaxDepth) +
                      "], got " + std::to_string(depth));
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be a positive real");
  TreeModel t;
  t.depth = depth;
  t.dt = dt;
  t.sqrt_dt = std::sqrt(dt);
  return t;
}

std::vector<double> cond_expectation(std::span<const double> values_at_m, int m, int n) {
  if (n > m) throw ConfigError("cond_expectation: n > m");
  std::vector<double> cur(values_at_m.begin(), values_at_m.end());
  std::vector<double> next;
  for (int lvl = m; lvl > n; --lvl) {
    next.resize(cur.size() / 2);
    const double* in = cur.data();
    double* out = next.data();
    parallel_for(next.size(), 1u << 14, [&](std::size_t b, std::size_t e) {
      kernels::pair_half_sum(in + 2 * b, out + b, e - b);
    });
    cur.swap(next);
  }
  return cur;
}

double expectation(std::span<const double> values, int level) {
  return cond_expectation(values, level, 0)[0];
}

AdaptedProcess brownian_process(const TreeModel& tree) {
  AdaptedProcess w(tree.depth);
  for (int n = 0; n <= tree.depth; ++n) {
    auto lvl = w.level(n);
    for (std::size_t b = 0; b < lvl.size(); ++b) lvl[b] = tree.brownian(n, b);
  }
  return w;
}

PredictableProcess martingale_representation(const TreeModel& tree, const AdaptedProcess& M,
                                             double tol_rel) {
  double scale = 1.0;
  for (int n = 0; n <= tree.depth; ++n)
    for (double v : M.level(n)) scale = std::max(scale, std::abs(v));
  const double tol = tol_rel * scale;

  PredictableProcess z(tree.depth);
  const double denom = 2.0 * tree.sqrt_dt;
  for (int k = 1; k <= tree.depth; ++k) {
    auto parent = M.level(k - 1);
    auto child = M.level(k);
    auto zk = z.step(k);
    for (std::size_t b = 0; b < parent.size(); ++b) {
      const double up = child[2 * b + 1], down = child[2 * b];
      if (std::abs(0.5 * (up + down) - parent[b]) > tol)
        throw ContractError("martingale_representation: input is not a martingale at step " +
                            std::to_string(k) + ", node " + std::to_string(b));
      zk[b] = (up - down) / denom;
    }
  }
  return z;
}

AdaptedProcess doleans_dade(const TreeModel& tree, const AdaptedProcess& dx) {
  AdaptedProcess e(tree.depth);
  e.at(0, 0) = 1.0;
  std::vector<double> factor;
  for (int k = 1; k <= tree.depth; ++k) {
    auto jump = dx.level(k);
    factor.resize(jump.size());
    for (std::size_t b = 0; b < jump.size(); ++b) factor[b] = 1.0 + jump[b];
    const double* par = e.level(k - 1).data();
    double* out = e.level(k).data();
    const double* fac = factor.data();
    parallel_for(jump.size() / 2, 1u << 14, [&](std::size_t b, std::size_t ee) {
      kernels::expand_mul(par + b, fac + 2 * b, out + 2 * b, ee - b);
    });
  }
  return e;
}

}  // namespace rbsde
