#include "rbsde/estimates.hpp"

#include <cmath>

#include "rbsde/parallel.hpp"

namespace rbsde {

namespace {

CheckLine line(std::string name, double residual, double tol) {
  return CheckLine{std::move(name), residual, tol, residual <= tol};
}

std::vector<double> measure_weights(const EnlargedSpace& sp, Measure mu, int T) {
  std::vector<double> w(sp.states());
  for (std::size_t s = 0; s < w.size(); ++s)
    w[s] = mu == Measure::P ? sp.pw[s] : sp.qweight(s, T);
  return w;
}

double lp_mean(const std::vector<double>& w, const std::vector<double>& powed, double p) {
  return std::pow(block_dot(w.data(), powed.data(), w.size()), 1.0 / p);
}

}  // namespace

double kappa(double a) {
  return std::pow(3.0, 1.0 / a) * (5.0 + std::pow(std::max(a, 1.0 / a), 1.0 / a));
}

NormReport solution_norms(const SolutionG& sol, const DataTriplet& data,
                          const RandomTimeModel& rt, const EnlargedSpace& space, double p,
                          Measure mu, int window) {
  if (!(p > 1.0)) throw ConfigError("norms require p > 1");
  const int T = sol.T;
  const int w = window < 0 ? T : std::min(window, T);
  const int N = space.depth;
  const double dt = rt.tree.dt;
  const std::size_t ns = space.states();

  std::vector<double> supyp(ns), z2p(ns), mmp(ns), kkp(ns), xip(ns), ffp(ns), ssp(ns);
  parallel_for(ns, 1024, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t s = lo; s < hi; ++s) {
      const int stop = space.stop_level(s, w);
      const std::uint64_t leaf = space.leaf_of(s);
      const int cls = space.class_of(s);
      double supy = 0.0, z2 = 0.0, mm = 0.0, kk = 0.0, ff = 0.0, ss = 0.0;
      for (int n = 0; n <= stop; ++n) {
        supy = std::max(supy, std::abs(solution_y(sol, space, s, n)));
        if (data.S)
          ss = std::max(ss, std::max(0.0, data.S->at(n, TreeModel::prefix(leaf, N, n))));
      }
      for (int n = 1; n <= stop; ++n) {
        const std::uint64_t v = TreeModel::prefix(leaf, N, n);
        const std::uint64_t par = v >> 1;
        const bool died = space.dies_in_tree(s) && n == cls;
        const double z = sol.Z.at(n, par);
        z2 += z * z * dt;
        const double dm = died ? sol.dM_death.at(n, v) : sol.dM_surv.at(n, v);
        mm += dm * dm;
        kk += sol.dK.at(n, par);
        ff += std::abs(data.f.at(n - 1, par)) * dt;
      }
      const double xi = data.h.at(stop, TreeModel::prefix(leaf, N, stop));
      supyp[s] = std::pow(supy, p);
      z2p[s] = std::pow(z2, 0.5 * p);
      mmp[s] = std::pow(mm, 0.5 * p);
      kkp[s] = std::pow(kk, p);
      xip[s] = std::pow(std::abs(xi), p);
      ffp[s] = std::pow(ff, p);
      ssp[s] = std::pow(ss, p);
    }
  });

  const auto wv = measure_weights(space, mu, T);
  NormReport nr;
  nr.p = p;
  nr.measure = mu;
  nr.T = T;
  nr.window = w;
  nr.yNorm = lp_mean(wv, supyp, p);
  nr.zNorm = lp_mean(wv, z2p, p);
  nr.mNorm = lp_mean(wv, mmp, p);
  nr.kNorm = lp_mean(wv, kkp, p);
  nr.dataNorm = lp_mean(wv, xip, p) + lp_mean(wv, ffp, p) + lp_mean(wv, ssp, p);
  nr.ratio = nr.dataNorm > 0.0
                 ? (nr.yNorm + nr.zNorm + nr.mNorm + nr.kNorm) / nr.dataNorm
                 : 0.0;
  return nr;
}

AprioriReport verify_apriori_bounded(const DataTriplet& data, const RandomTimeModel& rt,
                                     const EnlargedSpace& space, double p, int T) {
  AprioriReport rep;
  for (int t = 1; t <= T; ++t) {
    const auto tf = transform_data(data, rt, t);
    const auto solF = solve_f_rbsde(tf, rt.tree);
    const auto solG = lift_solution(solF, rt, data, t, false);
    auto nr = solution_norms(solG, data, rt, space, p, Measure::Qtilde);
    rep.finite = rep.finite && std::isfinite(nr.ratio);
    rep.max_ratio = std::max(rep.max_ratio, nr.ratio);
    rep.per_horizon.push_back(std::move(nr));
  }
  return rep;
}

StabilityReport verify_stability(const SolutionG& solA, const SolutionG& solB,
                                 const DataTriplet& dataA, const DataTriplet& dataB,
                                 const RandomTimeModel& rt, const EnlargedSpace& space,
                                 double p) {
  if (solA.T != solB.T) throw ConfigError("stability check needs a common horizon");
  if (dataA.no_barrier() != dataB.no_barrier())
    throw ConfigError("stability check needs the same barrier mode on both data sets");
  const int T = solA.T;
  const int N = space.depth;
  const double dt = rt.tree.dt;
  const std::size_t ns = space.states();

  std::vector<double> dyp(ns), dz2p(ns), dmmp(ns), dxip(ns), dffp(ns), dssp(ns);
  parallel_for(ns, 1024, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t s = lo; s < hi; ++s) {
      const int stop = space.stop_level(s, T);
      const std::uint64_t leaf = space.leaf_of(s);
      const int cls = space.class_of(s);
      double dy = 0.0, dz2 = 0.0, dmm = 0.0, dff = 0.0, dss = 0.0;
      for (int n = 0; n <= stop; ++n) {
        dy = std::max(dy, std::abs(solution_y(solA, space, s, n) -
                                   solution_y(solB, space, s, n)));
        if (dataA.S) {
          const std::uint64_t v = TreeModel::prefix(leaf, N, n);
          dss = std::max(dss, std::abs(dataA.S->at(n, v) - dataB.S->at(n, v)));
        }
      }
      for (int n = 1; n <= stop; ++n) {
        const std::uint64_t v = TreeModel::prefix(leaf, N, n);
        const std::uint64_t par = v >> 1;
        const bool died = space.dies_in_tree(s) && n == cls;
        const double dz = solA.Z.at(n, par) - solB.Z.at(n, par);
        dz2 += dz * dz * dt;
        const double dm = died ? solA.dM_death.at(n, v) - solB.dM_death.at(n, v)
                               : solA.dM_surv.at(n, v) - solB.dM_surv.at(n, v);
        dmm += dm * dm;
        dff += std::abs(dataA.f.at(n - 1, par) - dataB.f.at(n - 1, par)) * dt;
      }
      const std::uint64_t stop_node = TreeModel::prefix(leaf, N, stop);
      dxip[s] = std::pow(std::abs(dataA.h.at(stop, stop_node) - dataB.h.at(stop, stop_node)), p);
      dyp[s] = std::pow(dy, p);
      dz2p[s] = std::pow(dz2, 0.5 * p);
      dmmp[s] = std::pow(dmm, 0.5 * p);
      dffp[s] = std::pow(dff, p);
      dssp[s] = std::pow(dss, p);
    }
  });

  const auto wq = measure_weights(space, Measure::Qtilde, T);
  StabilityReport rep;
  rep.lhs = lp_mean(wq, dyp, p) + lp_mean(wq, dz2p, p) + lp_mean(wq, dmmp, p);
  const double dsnorm = lp_mean(wq, dssp, p);
  rep.delta_rhs = lp_mean(wq, dxip, p) + lp_mean(wq, dffp, p) + dsnorm;
  const double deltaA = solution_norms(solA, dataA, rt, space, p, Measure::Qtilde).dataNorm;
  const double deltaB = solution_norms(solB, dataB, rt, space, p, Measure::Qtilde).dataNorm;
  rep.cross_rhs = std::sqrt(dsnorm) * std::sqrt(deltaA + deltaB);
  const double denom = rep.delta_rhs + rep.cross_rhs;
  rep.ratio = denom > 0.0 ? rep.lhs / denom : 0.0;
  rep.finite = std::isfinite(rep.lhs) && std::isfinite(rep.ratio);
  return rep;
}

DiscountedReport verify_discounted(const SolutionG& sol, const DataTriplet& data,
                                   const RandomTimeModel& rt, const EnlargedSpace& space,
                                   double p) {
  const int T = sol.T;
  const int N = space.depth;
  const double dt = rt.tree.dt;
  const std::size_t ns = space.states();

  std::vector<double> yv(ns), zv(ns), mv(ns), kv(ns);
  parallel_for(ns, 1024, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t s = lo; s < hi; ++s) {
      const int stop = space.stop_level(s, T);
      const std::uint64_t leaf = space.leaf_of(s);
      const int cls = space.class_of(s);
      double supy = 0.0, z2 = 0.0, mm = 0.0, kk = 0.0;
      for (int n = 0; n <= stop; ++n) {
        const double et = rt.Etilde.at(n, TreeModel::prefix(leaf, N, n));
        supy = std::max(supy, et * std::pow(std::abs(solution_y(sol, space, s, n)), p));
      }
      for (int n = 1; n <= stop; ++n) {
        const std::uint64_t v = TreeModel::prefix(leaf, N, n);
        const std::uint64_t par = v >> 1;
        const bool died = space.dies_in_tree(s) && n == cls;
        const double epre = rt.Etilde.at(n - 1, par);
        const double efac = std::pow(epre, 2.0 / p);
        const double z = sol.Z.at(n, par);
        z2 += efac * z * z * dt;
        const double dm = died ? sol.dM_death.at(n, v) : sol.dM_surv.at(n, v);
        mm += efac * dm * dm;
        kk += std::pow(epre, 1.0 / p) * sol.dK.at(n, par);
      }
      yv[s] = supy;
      zv[s] = std::pow(z2, 0.5 * p);
      mv[s] = std::pow(mm, 0.5 * p);
      kv[s] = std::pow(kk, p);
    }
  });

  const auto wp = measure_weights(space, Measure::P, T);
  DiscountedReport rep;
  rep.lhs = std::pow(block_dot(wp.data(), yv.data(), ns), 1.0 / p) +
            std::pow(block_dot(wp.data(), zv.data(), ns), 1.0 / p) +
            std::pow(block_dot(wp.data(), mv.data(), ns), 1.0 / p) +
            std::pow(block_dot(wp.data(), kv.data(), ns), 1.0 / p);
  rep.rhs = solution_norms(sol, data, rt, space, p, Measure::Qtilde).dataNorm;
  rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
  rep.finite = std::isfinite(rep.lhs) && std::isfinite(rep.ratio);
  return rep;
}

AdaptedProcess ProcessGen::adapted(const TreeModel& tree, double loc, double scale) {
  AdaptedProcess x(tree.depth);
  for (int n = 0; n <= tree.depth; ++n)
    for (double& v : x.level(n)) v = loc + scale * rng.normal();
  return x;
}

AdaptedProcess ProcessGen::martingale(const TreeModel& tree) {
  const int N = tree.depth;
  std::vector<double> leaf(tree.leaves());
  for (double& v : leaf) v = rng.normal();
  AdaptedProcess m(N);
  for (int n = N; n >= 0; --n) {
    auto values = cond_expectation(leaf, N, n);
    std::copy(values.begin(), values.end(), m.level(n).begin());
  }
  return m;
}

AdaptedProcess ProcessGen::nondecreasing(const TreeModel& tree) {
  AdaptedProcess x(tree.depth);
  for (int n = 1; n <= tree.depth; ++n)
    for (std::size_t b = 0; b < x.level(n).size(); ++b)
      x.at(n, b) = x.at(n - 1, b >> 1) + std::abs(rng.normal());
  return x;
}

StoppedGProcess ProcessGen::g_process(const TreeModel& tree) {
  StoppedGProcess g;
  g.alive = adapted(tree);
  g.death = adapted(tree);
  return g;
}

GIncrements ProcessGen::g_nonneg_increments(const TreeModel& tree) {
  GIncrements g;
  g.surv = AdaptedProcess(tree.depth);
  g.death = AdaptedProcess(tree.depth);
  for (int n = 1; n <= tree.depth; ++n)
    for (std::size_t b = 0; b < g.surv.level(n).size(); ++b) {
      g.surv.at(n, b) = std::abs(rng.normal());
      g.death.at(n, b) = std::abs(rng.normal());
    }
  return g;
}

CheckReport verify_lemma_discounting(const RandomTimeModel& rt, const EnlargedSpace& space,
                                     double p, int T, std::uint64_t seed, int instances) {
  const int N = space.depth;
  const TreeModel& tree = rt.tree;
  ProcessGen gen(seed);
  const std::size_t ns = space.states();
  const auto wp = measure_weights(space, Measure::P, T);
  const auto wq = measure_weights(space, Measure::Qtilde, T);
  const double g0 = rt.g0();

  double worst_a = -1.0, worst_b1 = -1.0, worst_b2 = -1.0, worst_c = -1.0, worst_d = -1.0;
  const double a1 = 1.0 / p, a2 = 2.0 / p;

  std::vector<double> lhs(ns), rhs(ns), rhs2(ns);
  for (int it = 0; it < instances; ++it) {
    {  // (a) survival-discounted running supremum
      const auto Y = gen.g_process(tree);
      for (std::size_t s = 0; s < ns; ++s) {
        const int stop = space.stop_level(s, T);
        const std::uint64_t leaf = space.leaf_of(s);
        double l = 0.0, r = 0.0;
        for (int n = 0; n <= stop; ++n) {
          const double y =
              std::abs(stopped_state_value(Y.alive, Y.death, T, space, s, n));
          const double yp = std::pow(y, p);
          l = std::max(l, rt.Etilde.at(n, TreeModel::prefix(leaf, N, n)) * yp);
          r = std::max(r, yp);
        }
        lhs[s] = l;
        rhs[s] = r;
      }
      const double L = block_dot(wp.data(), lhs.data(), ns);
      const double R = block_dot(wq.data(), rhs.data(), ns) / g0;
      worst_a = std::max(worst_a, L - R);
    }
    {  // (b) discounted nondecreasing integrals, a in {1/p, 2/p}
      const auto dK = gen.g_nonneg_increments(tree);
      for (double a : {a1, a2}) {
        for (std::size_t s = 0; s < ns; ++s) {
          const int stop = space.stop_level(s, T);
          const std::uint64_t leaf = space.leaf_of(s);
          const int cls = space.class_of(s);
          double acc = 0.0, ktot = 0.0, jumps = 0.0;
          for (int n = 1; n <= stop; ++n) {
            const std::uint64_t v = TreeModel::prefix(leaf, N, n);
            const bool died = space.dies_in_tree(s) && n == cls;
            const double dk = died ? dK.death.at(n, v) : dK.surv.at(n, v);
            acc += std::pow(rt.Etilde.at(n - 1, v >> 1), a) * dk;
            ktot += dk;
            jumps += rt.Gtilde.at(n, v) * std::pow(dk, 1.0 / a);
          }
          lhs[s] = std::pow(acc, 1.0 / a);
          rhs[s] = std::pow(ktot, 1.0 / a) + jumps;
        }
        const double L = block_dot(wp.data(), lhs.data(), ns);
        const double R = kappa(a) / g0 * block_dot(wq.data(), rhs.data(), ns);
        if (a == a1)
          worst_b1 = std::max(worst_b1, L - R);
        else
          worst_b2 = std::max(worst_b2, L - R);
      }
    }
    {  // (c)+(d) default-bracket inequalities
      const auto Hg = gen.g_nonneg_increments(tree);  // G-optional weight
      AdaptedProcess Hf(tree.depth);                  // F-optional weight
      for (int n = 0; n <= N; ++n)
        for (double& v : Hf.level(n)) v = std::abs(gen.rng.normal());
      const double kap = kappa(2.0 / p);
      for (int variant = 0; variant < 2; ++variant) {
        for (std::size_t s = 0; s < ns; ++s) {
          const int stop = space.stop_level(s, T);
          const std::uint64_t leaf = space.leaf_of(s);
          const int cls = space.class_of(s);
          double acc = 0.0, bracket = 0.0, jumps = 0.0;
          for (int n = 1; n <= stop; ++n) {
            const std::uint64_t v = TreeModel::prefix(leaf, N, n);
            const bool died = space.dies_in_tree(s) && n == cls;
            const double x = rt.x(n, v);
            const double dn = died ? 1.0 - x : -x;
            const double h = variant == 0 ? (died ? Hg.death.at(n, v) : Hg.surv.at(n, v))
                                          : Hf.at(n, v);
            acc += std::pow(rt.Etilde.at(n - 1, v >> 1), 2.0 / p) * h * dn * dn;
            bracket += h * dn * dn;
            if (variant == 0)
              jumps += std::pow(h, 0.5 * p) * rt.Gtilde.at(n, v) * std::abs(dn);
          }
          if (variant == 1) {
            const int upto = space.dies_in_tree(s) ? std::min(T, cls - 1) : T;
            for (int n = 1; n <= upto; ++n) {
              const std::uint64_t v = TreeModel::prefix(leaf, N, n);
              jumps += 2.0 * std::pow(Hf.at(n, v), 0.5 * p) * rt.dD.at(n, v);
            }
          }
          lhs[s] = std::pow(acc, 0.5 * p);
          rhs[s] = std::pow(bracket, 0.5 * p);
          rhs2[s] = jumps;
        }
        const double L = block_dot(wp.data(), lhs.data(), ns);
        const double R = kap / g0 * (block_dot(wq.data(), rhs.data(), ns) +
                                     block_dot(wq.data(), rhs2.data(), ns));
        if (variant == 0)
          worst_c = std::max(worst_c, L - R);
        else
          worst_d = std::max(worst_d, L - R);
      }
    }
  }

  CheckReport rep;
  const double tol = 1e-12;
  rep.lines.push_back(line("discount lemma (a): E[sup Etilde |Y|^p] <= G0^-1 Eq[sup |Y|^p]",
                           std::max(0.0, worst_a), tol));
  rep.lines.push_back(line("discount lemma (b), a = 1/p, kappa = " + std::to_string(kappa(a1)),
                           std::max(0.0, worst_b1), tol));
  rep.lines.push_back(line("discount lemma (b), a = 2/p, kappa = " + std::to_string(kappa(a2)),
                           std::max(0.0, worst_b2), tol));
  rep.lines.push_back(line("discount lemma (c): default bracket, G-optional weight",
                           std::max(0.0, worst_c), tol));
  rep.lines.push_back(line("discount lemma (d): default bracket, F-optional weight",
                           std::max(0.0, worst_d), tol));
  return rep;
}

CheckReport verify_tail_bound(const RandomTimeModel& rt, const EnlargedSpace& space, double r,
                              int T, std::uint64_t seed, int instances) {
  const int N = space.depth;
  ProcessGen gen(seed);
  const auto wq = measure_weights(space, Measure::Qtilde, T);
  double worst = -1.0;
  for (int it = 0; it < instances; ++it) {
    const auto X = gen.nondecreasing(rt.tree);
    std::vector<double> etx(rt.tree.nodes(T));
    for (std::size_t b = 0; b < etx.size(); ++b) {
      double acc = 0.0;
      for (int k = 1; k <= T; ++k) {
        const std::uint64_t v = TreeModel::prefix(b, T, k);
        acc += rt.Etilde.at(k - 1, v >> 1) * (X.at(k, v) - X.at(k - 1, v >> 1));
      }
      etx[b] = std::pow(acc, r);
    }
    const double lhs = std::pow(expectation(etx, T), 1.0 / r);
    std::vector<double> xr(space.states());
    for (std::size_t s = 0; s < space.states(); ++s) {
      const int stop = space.stop_level(s, T);
      xr[s] = std::pow(X.at(stop, TreeModel::prefix(space.leaf_of(s), N, stop)), r);
    }
    const double rhs = 2.0 * std::pow(rt.g0(), -1.0 / r) *
                       std::pow(block_dot(wq.data(), xr.data(), xr.size()), 1.0 / r);
    worst = std::max(worst, lhs - rhs);
  }
  CheckReport rep;
  rep.lines.push_back(line("nondecreasing tail bound, factor 2 G0^{-1/r}, r = " +
                               std::to_string(r),
                           std::max(0.0, worst), 1e-12));
  return rep;
}

HolderReport verify_holder_inequality(const TreeModel& tree, std::uint64_t seed, int nseeds,
                                         double a, double b) {
  if (!(a > 1.0) || !(b > 1.0)) throw ConfigError("Hoelder exponents must exceed 1");
  const double r = 1.0 / (1.0 / a + 1.0 / b);
  const int N = tree.depth;
  ProcessGen gen(seed);
  HolderReport rep;
  std::vector<double> hm_sup(tree.leaves()), x_sup(tree.leaves()), br(tree.leaves());
  for (int it = 0; it < nseeds; ++it) {
    const auto M = gen.martingale(tree);
    const auto X = gen.adapted(tree);
    PredictableProcess H(N);
    for (int k = 1; k <= N; ++k)
      for (std::size_t q = 0; q < H.step(k).size(); ++q) {
        const double u = 2.0 * gen.rng.uniform() - 1.0;
        H.at(k, q) = u * X.at(k - 1, q);
        if (std::abs(H.at(k, q)) > std::abs(X.at(k - 1, q)) + 1e-15)
          throw ContractError("integrand bound |H| <= |X_-| violated by the generator");
      }
    for (std::size_t leaf = 0; leaf < tree.leaves(); ++leaf) {
      double hm = 0.0, sup_hm = 0.0, sup_x = std::abs(X.at(0, 0)), qv = 0.0;
      for (int k = 1; k <= N; ++k) {
        const std::uint64_t v = TreeModel::prefix(leaf, N, k);
        const double dm = M.at(k, v) - M.at(k - 1, v >> 1);
        hm += H.at(k, v >> 1) * dm;
        sup_hm = std::max(sup_hm, std::abs(hm));
        sup_x = std::max(sup_x, std::abs(X.at(k, v)));
        qv += dm * dm;
      }
      hm_sup[leaf] = std::pow(sup_hm, r);
      x_sup[leaf] = std::pow(sup_x, a);
      br[leaf] = std::pow(qv, 0.5 * b);
    }
    const double lhs = std::pow(expectation(hm_sup, N), 1.0 / r);
    const double den = std::pow(expectation(x_sup, N), 1.0 / a) *
                       std::pow(expectation(br, N), 1.0 / b);
    if (den > 1e-12) {
      rep.max_ratio = std::max(rep.max_ratio, lhs / den);
      ++rep.evaluated;
    }
  }
  return rep;
}

}  // namespace rbsde
