#include "rbsde/random_time.hpp"

#include <cmath>

#include "rbsde/kernels.hpp"
#include "rbsde/parallel.hpp"
#include "rbsde/rng.hpp"

namespace rbsde {

namespace {

// Per-leaf survival tails: tail(leaf) = sum_{j > n} alpha_j + alpha_inf,
// accumulated back to front so the order is fixed.
std::vector<double> survival_tail(const DensityKernel& k, int n) {
  const std::size_t leaves = std::size_t{1} << k.depth;
  std::vector<double> tail(leaves);
  for (std::size_t w = 0; w < leaves; ++w) {
    double s = k.a_inf(w);
    for (int j = k.depth; j > n; --j) s += k.a(w, j);
    tail[w] = s;
  }
  return tail;
}

std::vector<double> alpha_slice(const DensityKernel& k, int j) {
  const std::size_t leaves = std::size_t{1} << k.depth;
  std::vector<double> a(leaves);
  for (std::size_t w = 0; w < leaves; ++w) a[w] = k.a(w, j);
  return a;
}

double max_abs(const AdaptedProcess& x) {
  double s = 0.0;
  for (int n = 0; n <= x.depth(); ++n)
    for (double v : x.level(n)) s = std::max(s, std::abs(v));
  return s;
}

}  // namespace

void DensityKernel::validate() {
  const std::size_t leaves = std::size_t{1} << depth;
  if (alpha.size() != leaves * static_cast<std::size_t>(classes()))
    throw ConstructionError("density kernel has wrong shape");
  for (std::size_t w = 0; w < leaves; ++w) {
    double s = 0.0;
    for (int j = 0; j < classes(); ++j) {
      const double v = alpha[w * classes() + j];
      if (!(v >= 0.0) || !std::isfinite(v))
        throw ConstructionError("density kernel entry negative or non-finite", depth, w);
      s += v;
    }
    if (std::abs(s - 1.0) > 1e-14)
      throw ConstructionError("density kernel row mass differs from 1 by " +
                                  std::to_string(std::abs(s - 1.0)),
                              depth, w);
    if (finite_tau) {
      double& ainf = alpha[w * classes() + depth + 1];
      if (ainf > 1e-14)
        throw ConstructionError("finite-tau kernel puts mass beyond the tree", depth, w);
      ainf = 0.0;
    }
  }
}

RandomTimeModel build_random_time(const TreeModel& tree, DensityKernel kernel) {
  if (kernel.depth != tree.depth)
    throw ConstructionError("kernel depth does not match tree depth");
  kernel.validate();

  RandomTimeModel rt;
  rt.tree = tree;
  rt.finite_tau = kernel.finite_tau;
  rt.kernel = kernel;
  const int N = tree.depth;

  rt.G = AdaptedProcess(N);
  rt.dD = AdaptedProcess(N);
  for (int n = 0; n <= N; ++n) {
    auto tail = survival_tail(kernel, n);
    auto g = cond_expectation(tail, N, n);
    std::copy(g.begin(), g.end(), rt.G.level(n).begin());
    auto a = alpha_slice(kernel, n);
    auto d = cond_expectation(a, N, n);
    std::copy(d.begin(), d.end(), rt.dD.level(n).begin());
  }

  if (rt.finite_tau) {
    // alpha_inf == 0 makes the last-level tail identically zero; pin it.
    for (double& v : rt.G.level(N)) v = 0.0;
  }
  const int positive_limit = rt.finite_tau ? N - 1 : N;
  for (int n = 0; n <= positive_limit; ++n) {
    auto g = rt.G.level(n);
    for (std::size_t b = 0; b < g.size(); ++b)
      if (!(g[b] > 0.0))
        throw ConstructionError("survival probability not positive", n, b);
  }

  rt.Gtilde = AdaptedProcess(N);
  rt.D = AdaptedProcess(N);
  rt.m = AdaptedProcess(N);
  for (int n = 0; n <= N; ++n) {
    auto g = rt.G.level(n);
    auto gt = rt.Gtilde.level(n);
    auto dd = rt.dD.level(n);
    auto d = rt.D.level(n);
    auto mm = rt.m.level(n);
    for (std::size_t b = 0; b < g.size(); ++b) {
      gt[b] = g[b] + dd[b];
      d[b] = (n == 0 ? 0.0 : rt.D.at(n - 1, b >> 1)) + dd[b];
      mm[b] = g[b] + d[b];
    }
  }
  if (rt.finite_tau) {
    auto gt = rt.Gtilde.level(N);
    for (std::size_t b = 0; b < gt.size(); ++b)
      if (!(gt[b] > 0.0))
        throw ConstructionError(
            "finite-tau kernel leaves no terminal death mass (Gtilde = 0)", N, b);
  }

  rt.Etilde = AdaptedProcess(N);
  rt.Em = AdaptedProcess(N);
  rt.Ztilde = AdaptedProcess(N);
  rt.VF = AdaptedProcess(N);
  rt.Etilde.at(0, 0) = 1.0;
  rt.Em.at(0, 0) = 1.0;
  rt.Ztilde.at(0, 0) = 1.0;
  rt.VF.at(0, 0) = 0.0;
  for (int n = 1; n <= N; ++n) {
    const auto sz = rt.G.level(n).size();
    std::vector<double> surv_factor(sz), em_factor(sz), zt_factor(sz);
    for (std::size_t b = 0; b < sz; ++b) {
      const double gprev = rt.G.at(n - 1, b >> 1);
      surv_factor[b] = 1.0 - rt.x(n, b);
      em_factor[b] = rt.Gtilde.at(n, b) / gprev;
      zt_factor[b] = gprev / rt.Gtilde.at(n, b);
    }
    kernels::expand_mul(rt.Etilde.level(n - 1).data(), surv_factor.data(),
                        rt.Etilde.level(n).data(), sz / 2);
    kernels::expand_mul(rt.Em.level(n - 1).data(), em_factor.data(),
                        rt.Em.level(n).data(), sz / 2);
    kernels::expand_mul(rt.Ztilde.level(n - 1).data(), zt_factor.data(),
                        rt.Ztilde.level(n).data(), sz / 2);
    auto et = rt.Etilde.level(n);
    auto vf = rt.VF.level(n);
    for (std::size_t b = 0; b < sz; ++b) vf[b] = 1.0 - et[b];
  }
  return rt;
}

EnlargedSpace build_enlarged_space(const RandomTimeModel& model) {
  EnlargedSpace sp;
  sp.rt = &model;
  sp.depth = model.tree.depth;
  sp.classes = sp.depth + 2;
  const std::size_t leaves = model.tree.leaves();
  const double leaf_w = std::ldexp(1.0, -sp.depth);  // exact 2^-N
  sp.pw.resize(leaves * sp.classes);
  for (std::size_t w = 0; w < leaves; ++w)
    for (int j = 0; j < sp.classes; ++j)
      sp.pw[w * sp.classes + j] = leaf_w * model.kernel.alpha[w * sp.classes + j];
  return sp;
}

double qtilde_expectation(const EnlargedSpace& space, std::span<const double> per_state, int T) {
  std::vector<double> qw(space.states());
  parallel_for(space.states(), 1u << 14, [&](std::size_t b, std::size_t e) {
    for (std::size_t s = b; s < e; ++s) qw[s] = space.qweight(s, T);
  });
  return block_dot(qw.data(), per_state.data(), space.states());
}

QtildeAtomMasses qtilde_atom_masses(const EnlargedSpace& space, int T) {
  const RandomTimeModel& rt = *space.rt;
  const int N = space.depth;
  QtildeAtomMasses qm;
  qm.T = T;
  qm.die = AdaptedProcess(N);
  qm.alive = AdaptedProcess(N);
  for (int n = 0; n <= N; ++n) {
    auto die = qm.die.level(n);
    const double lw = std::ldexp(1.0, -n);
    const int zl = std::min(n, T);
    for (std::size_t b = 0; b < die.size(); ++b)
      die[b] = lw * rt.dD.at(n, b) * rt.Ztilde.at(zl, TreeModel::prefix(b, n, zl));
  }
  auto alive_leaf = qm.alive.level(N);
  for (std::size_t w = 0; w < alive_leaf.size(); ++w) {
    const std::size_t s = space.state(w, N + 1);
    alive_leaf[w] = space.pw[s] * rt.Ztilde.at(T, TreeModel::prefix(w, N, T));
  }
  for (int n = N - 1; n >= 0; --n) {
    auto alive = qm.alive.level(n);
    for (std::size_t b = 0; b < alive.size(); ++b)
      alive[b] = (qm.die.at(n + 1, 2 * b) + qm.alive.at(n + 1, 2 * b)) +
                 (qm.die.at(n + 1, 2 * b + 1) + qm.alive.at(n + 1, 2 * b + 1));
  }
  return qm;
}

double check_g_projection(const EnlargedSpace& space, const AdaptedProcess& X, int m, int n) {
  const RandomTimeModel& rt = *space.rt;
  const int N = space.depth;
  if (m < n || m > N) throw ConfigError("check_g_projection: need n <= m <= depth");

  // Right side: E[X_m I_{n<tau} | F_n] / G_n via the tree.
  auto tail = survival_tail(rt.kernel, n);
  std::vector<double> weighted(tail.size());
  for (std::size_t w = 0; w < tail.size(); ++w)
    weighted[w] = X.at(m, TreeModel::prefix(w, N, m)) * tail[w];
  auto rhs_num = cond_expectation(weighted, N, n);

  // Left side: Bayes on the alive atoms of the enlarged space, under P.
  double worst = 0.0;
  const std::size_t atoms = std::size_t{1} << n;
  const std::size_t leaves_per = std::size_t{1} << (N - n);
  for (std::size_t b = 0; b < atoms; ++b) {
    if (!(rt.G.at(n, b) > 0.0)) continue;
    double mass = 0.0, acc = 0.0;
    for (std::size_t i = 0; i < leaves_per; ++i) {
      const std::uint64_t leaf = (b << (N - n)) | i;
      const double xv = X.at(m, TreeModel::prefix(leaf, N, m));
      for (int j = n + 1; j < space.classes; ++j) {
        const double w = space.pw[space.state(leaf, j)];
        mass += w;
        acc += w * xv;
      }
    }
    const double lhs = acc / mass;
    const double rhs = rhs_num[b] / rt.G.at(n, b);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

double ng_martingale_residual(const EnlargedSpace& space) {
  const RandomTimeModel& rt = *space.rt;
  const int N = space.depth;
  double worst = std::abs(rt.dD.at(0, 0) * (1.0 - rt.x(0, 0)) -
                          rt.G.at(0, 0) * rt.x(0, 0));
  for (int n = 1; n <= N; ++n) {
    const std::size_t parents = std::size_t{1} << (n - 1);
    for (std::size_t b = 0; b < parents; ++b) {
      const double gprev = rt.G.at(n - 1, b);
      if (!(gprev > 0.0)) continue;
      double acc = 0.0;
      for (int c = 0; c < 2; ++c) {
        const std::uint64_t v = (b << 1) | static_cast<std::uint64_t>(c);
        const double xv = rt.x(n, v);
        acc += rt.dD.at(n, v) * (1.0 - xv) - rt.G.at(n, v) * xv;
      }
      worst = std::max(worst, std::abs(acc / (2.0 * gprev)));
    }
  }
  return worst;
}

double ztilde_martingale_residual(const EnlargedSpace& space) {
  const RandomTimeModel& rt = *space.rt;
  const int N = space.depth;
  double worst = 0.0;
  for (int n = 1; n <= N; ++n) {
    const std::size_t parents = std::size_t{1} << (n - 1);
    for (std::size_t b = 0; b < parents; ++b) {
      const double gprev = rt.G.at(n - 1, b);
      if (!(gprev > 0.0)) continue;
      double acc = 0.0;
      for (int c = 0; c < 2; ++c) {
        const std::uint64_t v = (b << 1) | static_cast<std::uint64_t>(c);
        acc += rt.Gtilde.at(n, v) * rt.Ztilde.at(n, v);
      }
      worst = std::max(worst, std::abs(acc / (2.0 * gprev) - rt.Ztilde.at(n - 1, b)));
    }
  }
  return worst;
}

double w_qtilde_martingale_residual(const EnlargedSpace& space, int T) {
  const RandomTimeModel& rt = *space.rt;
  const auto qm = qtilde_atom_masses(space, T);
  double worst = 0.0;
  for (int n = 1; n <= T; ++n) {
    const std::size_t parents = std::size_t{1} << (n - 1);
    for (std::size_t b = 0; b < parents; ++b) {
      const double mass = qm.alive.at(n - 1, b);
      if (!(mass > 0.0)) continue;
      double acc = 0.0;
      for (int c = 0; c < 2; ++c) {
        const std::uint64_t v = (b << 1) | static_cast<std::uint64_t>(c);
        acc += (qm.die.at(n, v) + qm.alive.at(n, v)) * rt.tree.brownian(n, v);
      }
      worst = std::max(worst, std::abs(acc / mass - rt.tree.brownian(n - 1, b)));
    }
  }
  return worst;
}

double dv_tilde(double x, double a) {
  if (x >= 1.0) return 1.0;
  return -std::expm1(a * std::log1p(-x));
}

namespace {

CheckLine line(std::string name, double residual, double tol) {
  return CheckLine{std::move(name), residual, tol, residual <= tol};
}

// E[ sum_{k=1..T} payoff_k dVF_k + payoff_T Etilde_T ] on the tree, walking
// each level-T node's path. Shared by the transfer-identity checks.
double tree_transfer_sum(const RandomTimeModel& rt, const AdaptedProcess& X, int T) {
  const std::size_t nodes = std::size_t{1} << T;
  std::vector<double> acc(nodes);
  parallel_for(nodes, 1u << 12, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t b = lo; b < hi; ++b) {
      double s = X.at(T, b) * rt.Etilde.at(T, b);
      for (int k = 1; k <= T; ++k) {
        const std::uint64_t node = TreeModel::prefix(b, T, k);
        s += X.at(k, node) * rt.dVF(k, node);
      }
      acc[b] = s;
    }
  });
  return expectation(acc, T);
}

}  // namespace

CheckReport check_identities(const RandomTimeModel& rt, const EnlargedSpace& space, int T,
                             std::uint64_t seed) {
  const int N = rt.tree.depth;
  CheckReport rep;
  const double mscale = 1.0 + max_abs(rt.m);

  {  // m is an F-martingale
    double worst = 0.0;
    for (int n = 1; n <= N; ++n)
      for (std::size_t b = 0; b < rt.m.level(n - 1).size(); ++b)
        worst = std::max(worst, std::abs(0.5 * (rt.m.at(n, 2 * b) + rt.m.at(n, 2 * b + 1)) -
                                         rt.m.at(n - 1, b)));
    rep.lines.push_back(line("m martingale", worst, 1e-12 * mscale));
  }
  {  // Gtilde = G_- + dm (with G_{0-} = 1, m_{0-} = 1)
    double worst = std::abs(rt.Gtilde.at(0, 0) - (1.0 + rt.m.at(0, 0) - 1.0));
    for (int n = 1; n <= N; ++n)
      for (std::size_t b = 0; b < rt.Gtilde.level(n).size(); ++b)
        worst = std::max(worst, std::abs(rt.Gtilde.at(n, b) - rt.G.at(n - 1, b >> 1) -
                                         rt.m.at(n, b) + rt.m.at(n - 1, b >> 1)));
    rep.lines.push_back(line("Gtilde = G_- + dm", worst, 1e-12 * mscale));
  }
  {  // Gtilde - dD = G
    double worst = 0.0;
    for (int n = 0; n <= N; ++n)
      for (std::size_t b = 0; b < rt.G.level(n).size(); ++b)
        worst = std::max(worst,
                         std::abs(rt.Gtilde.at(n, b) - rt.dD.at(n, b) - rt.G.at(n, b)));
    rep.lines.push_back(line("Gtilde - dD = G", worst, 1e-12));
  }
  {  // multiplicative decomposition
    double worst = 0.0;
    for (int n = 0; n <= N; ++n)
      for (std::size_t b = 0; b < rt.G.level(n).size(); ++b)
        worst = std::max(worst, std::abs(rt.G.at(n, b) -
                                         rt.g0() * rt.Em.at(n, b) * rt.Etilde.at(n, b)));
    rep.lines.push_back(line("decomposition G = G0 * E((1/G_-).m) * Etilde", worst, 1e-12));
  }
  {  // Ztilde and Em are exact reciprocals
    double worst = 0.0;
    for (int n = 0; n <= N; ++n)
      for (std::size_t b = 0; b < rt.G.level(n).size(); ++b)
        worst = std::max(worst, std::abs(rt.Ztilde.at(n, b) * rt.Em.at(n, b) - 1.0));
    rep.lines.push_back(line("Ztilde * E((1/G_-).m) = 1", worst, 1e-12));
  }
  {  // VF nondecreasing with values in [0, 1); the finite-tau terminal level hits 1
    double worst = 0.0;
    for (int n = 1; n <= N; ++n)
      for (std::size_t b = 0; b < rt.VF.level(n).size(); ++b)
        worst = std::max(worst, -rt.dVF(n, b));
    for (int n = 0; n <= N; ++n)
      for (double v : rt.VF.level(n)) {
        worst = std::max(worst, -v);
        worst = std::max(worst, v - 1.0);
      }
    if (!rt.finite_tau)
      for (double v : rt.VF.level(N)) worst = std::max(worst, v - (1.0 - 1e-15));
    rep.lines.push_back(line("VF nondecreasing in [0,1)", worst, 1e-12));
  }
  {  // state mass and Qtilde normalization for every horizon
    rep.lines.push_back(
        line("state mass = 1", std::abs(block_sum(space.pw.data(), space.pw.size()) - 1.0),
             1e-14));
    std::vector<double> ones(space.states(), 1.0);
    double worst = 0.0;
    for (int t = 1; t <= T; ++t)
      worst = std::max(worst, std::abs(qtilde_expectation(space, ones, t) - 1.0));
    rep.lines.push_back(line("Qtilde normalization", worst, 1e-12));
  }
  rep.lines.push_back(line("N^G martingale under P", ng_martingale_residual(space), 1e-12));
  rep.lines.push_back(
      line("Ztilde stopped at tau martingale under P", ztilde_martingale_residual(space), 1e-12));
  rep.lines.push_back(line("W stopped at T^tau martingale under Qtilde",
                           w_qtilde_martingale_residual(space, T),
                           1e-12 * (1.0 + std::sqrt(N * rt.tree.dt))));

  Rng rng(seed * 0x9E3779B97F4A7C15ULL + 17);
  {  // transfer identity, optional payoff
    double worst = 0.0, scale = 1.0;
    for (int rep_i = 0; rep_i < 3; ++rep_i) {
      AdaptedProcess X(N);
      for (int n = 0; n <= N; ++n)
        for (double& v : X.level(n)) v = rng.normal();
      std::vector<double> per_state(space.states());
      for (std::size_t s = 0; s < space.states(); ++s) {
        const int l = space.stop_level(s, T);
        per_state[s] = X.at(l, TreeModel::prefix(space.leaf_of(s), N, l));
      }
      const double lhs = qtilde_expectation(space, per_state, T);
      const double rhs =
          rt.g0() * tree_transfer_sum(rt, X, T) + X.at(0, 0) * (1.0 - rt.g0());
      worst = std::max(worst, std::abs(lhs - rhs));
      scale = std::max(scale, std::abs(lhs));
    }
    rep.lines.push_back(line("payoff transfer identity (optional payoff)", worst, 1e-12 * scale));
  }
  {  // transfer identity, nondecreasing payoff
    double worst = 0.0, scale = 1.0;
    for (int rep_i = 0; rep_i < 3; ++rep_i) {
      AdaptedProcess X(N);
      X.at(0, 0) = std::abs(rng.normal());
      for (int n = 1; n <= N; ++n)
        for (std::size_t b = 0; b < X.level(n).size(); ++b)
          X.at(n, b) = X.at(n - 1, b >> 1) + std::abs(rng.normal());
      std::vector<double> per_state(space.states());
      for (std::size_t s = 0; s < space.states(); ++s) {
        const int l = space.stop_level(s, T);
        per_state[s] = X.at(l, TreeModel::prefix(space.leaf_of(s), N, l));
      }
      const double lhs = qtilde_expectation(space, per_state, T);
      std::vector<double> weighted(rt.tree.leaves());
      for (std::size_t w = 0; w < weighted.size(); ++w) {
        double s = 0.0;
        for (int k = 1; k <= T; ++k)
          s += rt.Etilde.at(k - 1, TreeModel::prefix(w, N, k - 1)) *
               (X.at(k, TreeModel::prefix(w, N, k)) - X.at(k - 1, TreeModel::prefix(w, N, k - 1)));
        weighted[w] = s;
      }
      const double rhs = X.at(0, 0) + rt.g0() * expectation(weighted, N);
      worst = std::max(worst, std::abs(lhs - rhs));
      scale = std::max(scale, std::abs(lhs));
    }
    rep.lines.push_back(
        line("payoff transfer identity (nondecreasing payoff)", worst, 1e-12 * scale));
  }
  {  // G-projection conversion
    const auto W = brownian_process(rt.tree);
    double worst = check_g_projection(space, W, N, std::max(0, T / 2));
    worst = std::max(worst, check_g_projection(space, rt.G, std::max(0, T - 1),
                                               std::max(0, T - 1)));
    rep.lines.push_back(line("G-projection conversion", worst,
                             1e-12 * (1.0 + std::sqrt(N * rt.tree.dt))));
  }
  return rep;
}

CheckReport check_compensator_bounds(const EnlargedSpace& space, int T,
                                     std::span<const double> a_grid) {
  const RandomTimeModel& rt = *space.rt;
  const int N = space.depth;
  CheckReport rep;

  {  // E^Qtilde[ D_{T^tau} - D_{(t^tau)-} | G_t ] <= Gtilde_t on alive atoms
    double worst = 0.0;
    for (int t = 0; t <= T; ++t) {
      const std::size_t atoms = std::size_t{1} << t;
      const std::size_t leaves_per = std::size_t{1} << (N - t);
      for (std::size_t b = 0; b < atoms; ++b) {
        if (!(rt.G.at(t, b) > 0.0)) continue;
        const double dprev = t == 0 ? 0.0 : rt.D.at(t - 1, b >> 1);
        double mass = 0.0, acc = 0.0;
        for (std::size_t i = 0; i < leaves_per; ++i) {
          const std::uint64_t leaf = (b << (N - t)) | i;
          for (int j = t + 1; j < space.classes; ++j) {
            const std::size_t s = space.state(leaf, j);
            const double qw = space.qweight(s, T);
            if (qw == 0.0) continue;
            const int l = space.stop_level(s, T);
            mass += qw;
            acc += qw * (rt.D.at(l, TreeModel::prefix(leaf, N, l)) - dprev);
          }
        }
        if (mass > 0.0)
          worst = std::max(worst, acc / mass - rt.Gtilde.at(t, b));
      }
    }
    rep.lines.push_back(line("conditional compensator mass <= Gtilde", worst, 1e-12));
  }
  {  // E[ sum_{t < u <= T^tau} dD_u / Gtilde_u | G_t ] <= 1 on alive atoms
    double worst = 0.0;
    for (int t = 0; t < T; ++t) {
      const std::size_t atoms = std::size_t{1} << t;
      const std::size_t leaves_per = std::size_t{1} << (N - t);
      for (std::size_t b = 0; b < atoms; ++b) {
        if (!(rt.G.at(t, b) > 0.0)) continue;
        double mass = 0.0, acc = 0.0;
        for (std::size_t i = 0; i < leaves_per; ++i) {
          const std::uint64_t leaf = (b << (N - t)) | i;
          for (int j = t + 1; j < space.classes; ++j) {
            const std::size_t s = space.state(leaf, j);
            const double w = space.pw[s];
            if (w == 0.0) continue;
            const int l = space.stop_level(s, T);
            double xs = 0.0;
            for (int u = t + 1; u <= l; ++u) xs += rt.x(u, TreeModel::prefix(leaf, N, u));
            mass += w;
            acc += w * xs;
          }
        }
        if (mass > 0.0) worst = std::max(worst, acc / mass - 1.0);
      }
    }
    rep.lines.push_back(line("normalized compensator mass <= 1", worst, 1e-12));
  }
  for (double a : a_grid) {  // max(a,1)*x dominates the Vtilde^(a) jump pathwise
    double worst = 0.0;
    const double c = std::max(a, 1.0);
    for (int n = 0; n <= N; ++n)
      for (std::size_t b = 0; b < rt.G.level(n).size(); ++b) {
        const double xv = rt.x(n, b);
        worst = std::max(worst, dv_tilde(xv, a) - c * xv);
      }
    rep.lines.push_back(
        line("max(a,1)*x >= dVtilde^(a), a = " + std::to_string(a), worst, 1e-14));
  }
  return rep;
}

}  // namespace rbsde
