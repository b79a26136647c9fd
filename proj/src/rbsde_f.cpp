#include "rbsde/rbsde_f.hpp"

#include <algorithm>
#include <cmath>

#include "rbsde/kernels.hpp"

namespace rbsde {

namespace {

void require_finite(const AdaptedProcess& x, const char* what, int upto) {
  for (int n = 0; n <= upto; ++n)
    for (double v : x.level(n))
      if (!std::isfinite(v)) throw ContractError(std::string(what) + " is not finite");
}

}  // namespace

void validate_triplet(const DataTriplet& data, const RandomTimeModel& rt, int T) {
  if (data.no_barrier()) return;
  const AdaptedProcess& S = *data.S;
  for (int j = 0; j <= T; ++j) {
    for (std::size_t b = 0; b < data.h.level(j).size(); ++b) {
      const bool death_mass = rt.dD.at(j, b) > 0.0;
      const bool horizon_mass = j == T && rt.G.at(T, b) > 0.0;
      if ((death_mass || horizon_mass) && data.h.at(j, b) < S.at(j, b))
        throw ContractError("terminal payoff below the barrier at node (level=" +
                            std::to_string(j) + ", bits=" + std::to_string(b) + ")");
    }
  }
}

TransformedDataF transform_data(const DataTriplet& data, const RandomTimeModel& rt, int T) {
  if (T < 1 || T > rt.tree.depth) throw ConfigError("horizon T out of range");
  require_finite(data.f, "driver f", T);
  require_finite(data.h, "payoff h", T);
  if (!data.no_barrier()) require_finite(*data.S, "barrier S", T);

  TransformedDataF out;
  out.T = T;
  out.fF = AdaptedProcess(rt.tree.depth);
  out.dA = AdaptedProcess(rt.tree.depth);
  if (!data.no_barrier()) out.SF = AdaptedProcess(rt.tree.depth);
  for (int n = 0; n <= T; ++n) {
    const auto et = rt.Etilde.level(n);
    for (std::size_t b = 0; b < et.size(); ++b) {
      out.fF.at(n, b) = et[b] * data.f.at(n, b);
      if (out.SF) out.SF->at(n, b) = et[b] * data.S->at(n, b);
    }
  }
  for (int k = 1; k <= T; ++k)
    for (std::size_t b = 0; b < out.dA.level(k).size(); ++b)
      out.dA.at(k, b) = out.fF.at(k - 1, b >> 1) * rt.tree.dt +
                        data.h.at(k, b) * rt.dVF(k, b);
  out.xiF.resize(rt.tree.nodes(T));
  for (std::size_t b = 0; b < out.xiF.size(); ++b)
    out.xiF[b] = rt.Etilde.at(T, b) * data.h.at(T, b);
  return out;
}

TransformedDataF transform_data_infinite(const DataTriplet& data, const RandomTimeModel& rt) {
  if (!rt.finite_tau)
    throw ConfigError("full-tree solve requires a finite-tau model");
  TransformedDataF out = transform_data(data, rt, rt.tree.depth);
  out.terminal_zero = true;
  std::fill(out.xiF.begin(), out.xiF.end(), 0.0);
  if (out.SF) {
    const auto last = out.SF->level(rt.tree.depth);
    for (std::size_t b = 0; b < last.size(); ++b)
      if (last[b] > 0.0)
        throw ContractError("barrier violates terminal condition at node (level=" +
                            std::to_string(rt.tree.depth) + ", bits=" + std::to_string(b) +
                            ")");
  }
  return out;
}

namespace {

SolutionF solve_impl(const TransformedDataF& data, const TreeModel& tree) {
  const int T = data.T;
  SolutionF sol;
  sol.T = T;
  sol.no_barrier = !data.SF.has_value();
  sol.Y = AdaptedProcess(T);
  sol.A = AdaptedProcess(T);
  sol.Z = PredictableProcess(T);
  sol.dK = PredictableProcess(T);

  for (int k = 1; k <= T; ++k) {
    auto a = sol.A.level(k);
    for (std::size_t b = 0; b < a.size(); ++b)
      a[b] = sol.A.at(k - 1, b >> 1) + data.dA.at(k, b);
  }

  // Snell envelope of the accumulated reward, backward.
  std::vector<double> u(tree.nodes(T));
  for (std::size_t b = 0; b < u.size(); ++b) u[b] = data.xiF[b] + sol.A.at(T, b);
  {
    auto y = sol.Y.level(T);
    for (std::size_t b = 0; b < u.size(); ++b) y[b] = u[b] - sol.A.at(T, b);
  }
  std::vector<double> cont;
  for (int n = T - 1; n >= 0; --n) {
    const std::size_t sz = tree.nodes(n);
    cont.resize(sz);
    kernels::pair_half_sum(u.data(), cont.data(), sz);
    const double denom = 2.0 * tree.sqrt_dt;
    auto z = sol.Z.step(n + 1);
    auto dk = sol.dK.step(n + 1);
    auto y = sol.Y.level(n);
    for (std::size_t b = 0; b < sz; ++b) {
      z[b] = (u[2 * b + 1] - u[2 * b]) / denom;
      double un = cont[b];
      if (data.SF) un = std::max(data.SF->at(n, b) + sol.A.at(n, b), un);
      dk[b] = un - cont[b];
      y[b] = un - sol.A.at(n, b);
      cont[b] = un;  // reflected value feeds the next backward step
    }
    u.swap(cont);
  }

  for (int n = 0; n <= T; ++n)
    for (double v : sol.Y.level(n)) sol.scale = std::max(sol.scale, std::abs(v));
  sol.scale += 1.0;

  // One-step dynamics residual:
  // Y_n = Y_{n+1} + fF_n dt + h_{n+1} dVF_{n+1} + dK_{n+1} - Z_n dW_{n+1}.
  double worst = 0.0;
  for (int n = 0; n < T; ++n) {
    for (std::size_t b = 0; b < tree.nodes(n); ++b) {
      for (int c = 0; c < 2; ++c) {
        const std::uint64_t v = (b << 1) | static_cast<std::uint64_t>(c);
        const double dw = (c ? 1.0 : -1.0) * tree.sqrt_dt;
        const double r = sol.Y.at(n, b) - sol.Y.at(n + 1, v) - data.dA.at(n + 1, v) -
                         sol.dK.at(n + 1, b) + sol.Z.at(n + 1, b) * dw;
        worst = std::max(worst, std::abs(r));
      }
    }
  }
  sol.max_dyn_residual = worst;
  return sol;
}

// Set of E[stopped reward | node] over every stopping rule on the subtree.
std::vector<double> stopping_value_set(const TransformedDataF& data, const AdaptedProcess& A,
                                       int n, std::uint64_t b) {
  if (n == data.T) return {data.xiF[b] + A.at(data.T, b)};
  const auto down = stopping_value_set(data, A, n + 1, b << 1);
  const auto up = stopping_value_set(data, A, n + 1, (b << 1) | 1);
  std::vector<double> out;
  out.reserve(up.size() * down.size() + 1);
  if (data.SF) out.push_back(data.SF->at(n, b) + A.at(n, b));
  for (double d : down)
    for (double a : up) out.push_back(0.5 * (d + a));
  return out;
}

}  // namespace

SolutionF solve_f_rbsde(const TransformedDataF& data, const TreeModel& tree) {
  return solve_impl(data, tree);
}

SolutionF solve_f_rbsde_infinite(const TransformedDataF& data, const TreeModel& tree) {
  if (!data.terminal_zero || data.T != tree.depth)
    throw ConfigError("full-tree solve expects transform_data_infinite output");
  return solve_impl(data, tree);
}

SkorokhodReport verify_skorokhod(const SolutionF& sol, const TransformedDataF& data) {
  SkorokhodReport rep;
  if (!data.SF) return rep;
  const double tol = 1e-10 * sol.scale;
  double pairing = 0.0, worst = 0.0;
  for (int n = 0; n < sol.T; ++n) {
    for (std::size_t b = 0; b < sol.Y.level(n).size(); ++b) {
      const double gap = sol.Y.at(n, b) - data.SF->at(n, b);
      const double dk = sol.dK.at(n + 1, b);
      pairing += gap * dk;
      worst = std::max(worst, std::min(dk, gap));
    }
  }
  rep.pairing_sum = pairing;
  rep.worst_pair = worst;
  rep.pass = std::abs(pairing) <= tol && worst <= tol;
  return rep;
}

double enumerate_f_stopping_max(const TransformedDataF& data, const TreeModel& tree) {
  (void)tree;
  if (data.T > 5) throw ConfigError("stopping-rule enumeration is limited to T <= 5");
  AdaptedProcess A(data.T);
  for (int k = 1; k <= data.T; ++k)
    for (std::size_t b = 0; b < A.level(k).size(); ++b)
      A.at(k, b) = A.at(k - 1, b >> 1) + data.dA.at(k, b);
  const auto values = stopping_value_set(data, A, 0, 0);
  return *std::max_element(values.begin(), values.end());
}

}  // namespace rbsde
