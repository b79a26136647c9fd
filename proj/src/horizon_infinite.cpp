#include "rbsde/horizon_infinite.hpp"

#include <cmath>

#include "rbsde/parallel.hpp"

namespace rbsde {

namespace {

AdaptedProcess driver_accumulator(const AdaptedProcess& f, const TreeModel& tree, int T) {
  AdaptedProcess af(T);
  for (int k = 1; k <= T; ++k)
    for (std::size_t b = 0; b < af.level(k).size(); ++b)
      af.at(k, b) = af.at(k - 1, b >> 1) + f.at(k - 1, b >> 1) * tree.dt;
  return af;
}

}  // namespace

double lp_pvf_norm(const AdaptedProcess& X, const RandomTimeModel& rt, double p) {
  if (!rt.finite_tau)
    throw ConfigError("VF total mass < 1; norm undefined for infinite-horizon semantics");
  if (!(p >= 1.0)) throw ConfigError("lp_pvf_norm requires p >= 1");
  const int N = rt.tree.depth;
  std::vector<double> acc(rt.tree.leaves());
  parallel_for(acc.size(), 1u << 12, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t w = lo; w < hi; ++w) {
      double s = 0.0;
      for (int k = 1; k <= N; ++k) {
        const std::uint64_t v = TreeModel::prefix(w, N, k);
        s += std::pow(std::abs(X.at(k, v)), p) * rt.dVF(k, v);
      }
      acc[w] = s;
    }
  });
  return std::pow(expectation(acc, N), 1.0 / p);
}

double delta_pvf(const DataTriplet& data, const RandomTimeModel& rt, double p,
                 bool positive_part_S) {
  if (!rt.finite_tau)
    throw ConfigError("VF total mass < 1; norm undefined for infinite-horizon semantics");
  const int N = rt.tree.depth;
  std::vector<double> acc(rt.tree.leaves());
  parallel_for(acc.size(), 1u << 12, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t w = lo; w < hi; ++w) {
      double s = 0.0, running_f = 0.0;
      double sup_s = 0.0;
      if (data.S) {
        const double s0 = data.S->at(0, 0);
        sup_s = positive_part_S ? std::max(0.0, s0) : std::abs(s0);
      }
      for (int k = 1; k <= N; ++k) {
        const std::uint64_t v = TreeModel::prefix(w, N, k);
        running_f += std::abs(data.f.at(k - 1, v >> 1)) * rt.tree.dt;
        if (data.S) {
          const double sv = data.S->at(k, v);
          sup_s = std::max(sup_s, positive_part_S ? std::max(0.0, sv) : std::abs(sv));
        }
        const double xk = running_f + std::abs(data.h.at(k, v)) + sup_s;
        s += std::pow(xk, p) * rt.dVF(k, v);
      }
      acc[w] = s;
    }
  });
  return std::pow(expectation(acc, N), 1.0 / p);
}

TruncationSchedule TruncationSchedule::all(int depth) {
  TruncationSchedule sch;
  for (int t = 1; t <= depth; ++t) sch.cutoffs.push_back(t);
  return sch;
}

namespace {

// Discounted distance between two stopped solutions under P:
// sup-norm of Etilde^{1/p} dY plus the quadratic norms of Etilde_-^{1/p} dZ
// and Etilde_-^{1/p} . dM, each over the full life of the states.
double discounted_diff_norm(const SolutionG& a, const SolutionG& b, const RandomTimeModel& rt,
                            const EnlargedSpace& space, double p) {
  const int N = space.depth;
  const double dt = rt.tree.dt;
  const std::size_t ns = space.states();
  std::vector<double> dyv(ns), dzv(ns), dmv(ns);
  parallel_for(ns, 1024, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t s = lo; s < hi; ++s) {
      const std::uint64_t leaf = space.leaf_of(s);
      const int cls = space.class_of(s);
      const int life = space.dies_in_tree(s) ? cls : N;
      const int stop_a = space.stop_level(s, a.T);
      const int stop_b = space.stop_level(s, b.T);
      double dy = 0.0, dz2 = 0.0, dm2 = 0.0;
      for (int n = 0; n <= life; ++n) {
        const double diff = solution_y(a, space, s, n) - solution_y(b, space, s, n);
        dy = std::max(dy, rt.Etilde.at(n, TreeModel::prefix(leaf, N, n)) *
                              std::pow(std::abs(diff), p));
      }
      for (int n = 1; n <= life; ++n) {
        const std::uint64_t v = TreeModel::prefix(leaf, N, n);
        const std::uint64_t par = v >> 1;
        const bool died = space.dies_in_tree(s) && n == cls;
        const double za = n <= stop_a ? a.Z.at(n, par) : 0.0;
        const double zb = n <= stop_b ? b.Z.at(n, par) : 0.0;
        const double ma =
            n <= stop_a ? (died ? a.dM_death.at(n, v) : a.dM_surv.at(n, v)) : 0.0;
        const double mb =
            n <= stop_b ? (died ? b.dM_death.at(n, v) : b.dM_surv.at(n, v)) : 0.0;
        const double efac = std::pow(rt.Etilde.at(n - 1, par), 2.0 / p);
        dz2 += efac * (za - zb) * (za - zb) * dt;
        dm2 += efac * (ma - mb) * (ma - mb);
      }
      dyv[s] = dy;
      dzv[s] = std::pow(dz2, 0.5 * p);
      dmv[s] = std::pow(dm2, 0.5 * p);
    }
  });
  const double yN = std::pow(block_dot(space.pw.data(), dyv.data(), ns), 1.0 / p);
  const double zN = std::pow(block_dot(space.pw.data(), dzv.data(), ns), 1.0 / p);
  const double mN = std::pow(block_dot(space.pw.data(), dmv.data(), ns), 1.0 / p);
  return yN + zN + mN;
}

}  // namespace

InfiniteSolveReport solve_infinite(const DataTriplet& data, const RandomTimeModel& rt,
                                   const EnlargedSpace& space, double p,
                                   const TruncationSchedule& schedule) {
  const int N = rt.tree.depth;
  validate_triplet(data, rt, N);
  InfiniteSolveReport rep;
  const auto tf = transform_data_infinite(data, rt);
  rep.solF = solve_f_rbsde_infinite(tf, rt.tree);
  rep.solG = lift_solution(rep.solF, rt, data, N, true);

  for (int cutoff : schedule.cutoffs) {
    if (cutoff < 1 || cutoff > N) throw ConfigError("truncation cutoff out of range");
    if (cutoff == N) {
      rep.cauchy.emplace_back(cutoff, 0.0);
      continue;
    }
    const auto tf_c = transform_data(data, rt, cutoff);
    const auto solF_c = solve_f_rbsde(tf_c, rt.tree);
    const auto solG_c = lift_solution(solF_c, rt, data, cutoff, false);
    rep.cauchy.emplace_back(cutoff, discounted_diff_norm(solG_c, rep.solG, rt, space, p));
  }

  rep.bound_lhs = verify_discounted(rep.solG, data, rt, space, p).lhs;
  rep.bound_rhs = delta_pvf(data, rt, p, true);
  rep.bound_rhs_abs = delta_pvf(data, rt, p, false);
  rep.bound_ratio = rep.bound_rhs > 0.0 ? rep.bound_lhs / rep.bound_rhs : 0.0;
  rep.finite = std::isfinite(rep.bound_lhs) && std::isfinite(rep.bound_ratio);
  return rep;
}

EquivalentCheckReport equivalent_rbsde_check(const SolutionG& sol, const DataTriplet& data,
                                             const RandomTimeModel& rt,
                                             const EnlargedSpace& space, double p) {
  if (!(p > 1.0)) throw ConfigError("equivalent_rbsde_check requires p > 1");
  const int N = space.depth;
  const double dt = rt.tree.dt;
  const double ip = 1.0 / p;
  EquivalentCheckReport rep;
  for (std::size_t s = 0; s < space.states(); ++s) {
    if (space.pw[s] == 0.0) continue;
    const int stop = space.stop_level(s, sol.T);
    const std::uint64_t leaf = space.leaf_of(s);
    const int cls = space.class_of(s);
    double ytil_prev =
        solution_y(sol, space, s, 0) * std::pow(rt.Etilde.at(0, 0), ip);
    rep.scale = std::max(rep.scale, std::abs(ytil_prev));
    for (int n = 1; n <= stop; ++n) {
      const std::uint64_t v = TreeModel::prefix(leaf, N, n);
      const std::uint64_t par = v >> 1;
      const double x = rt.x(n, v);
      const double y = solution_y(sol, space, s, n);
      const double ytil = y * std::pow(rt.Etilde.at(n, v), ip);
      rep.scale = std::max(rep.scale, std::abs(ytil));
      if (x < 1.0) {
        const bool died = space.dies_in_tree(s) && n == cls;
        const double dm = died ? sol.dM_death.at(n, v) : sol.dM_surv.at(n, v);
        const double dw = TreeModel::step_sign(v) * rt.tree.sqrt_dt;
        const double epre = std::pow(rt.Etilde.at(n - 1, par), ip);
        const double drift =
            ytil * std::pow(rt.Gtilde.at(n, v) / rt.G.at(n, v), ip) * dv_tilde(x, ip);
        const double r = ytil - ytil_prev + drift + data.f.at(n - 1, par) * epre * dt +
                         epre * sol.dK.at(n, par) - epre * dm - epre * sol.Z.at(n, par) * dw;
        rep.max_residual = std::max(rep.max_residual, std::abs(r));
      }
      ytil_prev = ytil;
    }
  }
  rep.pass = rep.max_residual <= 1e-9 * rep.scale;
  return rep;
}

InfiniteSolveReport solve_bsde_infinite(const AdaptedProcess& f, const AdaptedProcess& h,
                                        const RandomTimeModel& rt, const EnlargedSpace& space,
                                        double p) {
  DataTriplet data;
  data.f = f;
  data.h = h;
  TruncationSchedule sch;
  sch.cutoffs = {rt.tree.depth};
  auto rep = solve_infinite(data, rt, space, p, sch);
  for (int k = 1; k <= rep.solG.T; ++k)
    for (double v : rep.solG.dK.step(k))
      if (v != 0.0) throw ContractError("no-barrier solve produced a nonzero compensator");
  return rep;
}

OracleG bsde_direct_oracle(const AdaptedProcess& f, const AdaptedProcess& h,
                           const RandomTimeModel& rt, const EnlargedSpace& space) {
  const int N = space.depth;
  const auto af = driver_accumulator(f, rt.tree, N);
  OracleG o;
  o.T = N;
  o.aliveY = AdaptedProcess(N);
  o.deadY = AdaptedProcess(N);
  for (int j = 0; j <= N; ++j) {
    auto dy = o.deadY.level(j);
    for (std::size_t b = 0; b < dy.size(); ++b) dy[b] = h.at(j, b);
  }
  for (int n = 0; n <= N; ++n) {
    auto ay = o.aliveY.level(n);
    const std::size_t leaves_per = std::size_t{1} << (N - n);
    for (std::size_t b = 0; b < ay.size(); ++b) {
      if (n == N || !(rt.G.at(n, b) > 0.0)) {
        ay[b] = h.at(n, b);
        continue;
      }
      double mass = 0.0, acc = 0.0;
      const double af_here = af.at(n, b);
      for (std::size_t i = 0; i < leaves_per; ++i) {
        const std::uint64_t leaf = (b << (N - n)) | i;
        for (int j = n + 1; j < space.classes; ++j) {
          const std::size_t s = space.state(leaf, j);
          const double qw = space.qweight(s, N);
          if (qw == 0.0) continue;
          const int stop = space.stop_level(s, N);
          const std::uint64_t v = TreeModel::prefix(leaf, N, stop);
          mass += qw;
          acc += qw * (af.at(stop, v) - af_here + h.at(stop, v));
        }
      }
      ay[b] = acc / mass;
    }
  }
  return o;
}

LimitProfile qtilde_limit_check(const AdaptedProcess& X, const RandomTimeModel& rt,
                                const EnlargedSpace& space) {
  if (X.at(0, 0) != 0.0) throw ContractError("limit profile requires X_0 = 0");
  const int N = space.depth;
  LimitProfile prof;

  double max_x = 0.0;
  for (int n = 0; n <= N; ++n)
    for (std::size_t b = 0; b < X.level(n).size(); ++b) {
      max_x = std::max(max_x, std::abs(X.at(n, b)));
      prof.max_ratio = std::max(prof.max_ratio, std::abs(X.at(n, b)) / rt.Em.at(n, b));
    }
  prof.hypothesis_ok = std::isfinite(prof.max_ratio) && prof.max_ratio < 1e12;

  std::vector<double> per_state(space.states());
  for (int t = 1; t <= N; ++t) {
    for (std::size_t s = 0; s < space.states(); ++s) {
      const int l = space.stop_level(s, t);
      per_state[s] = X.at(l, TreeModel::prefix(space.leaf_of(s), N, l));
    }
    prof.value.push_back(qtilde_expectation(space, per_state, t));
  }

  std::vector<double> acc(rt.tree.leaves()), bnd(rt.tree.leaves());
  for (std::size_t w = 0; w < acc.size(); ++w) {
    double s = 0.0;
    for (int k = 1; k <= N; ++k) {
      const std::uint64_t v = TreeModel::prefix(w, N, k);
      s += X.at(k, v) * rt.dVF(k, v);
    }
    acc[w] = s;
    bnd[w] = X.at(N, w) * rt.Etilde.at(N, w);
  }
  prof.target = rt.g0() * expectation(acc, N);
  prof.boundary_term = rt.g0() * expectation(bnd, N);
  const double scale = 1.0 + std::abs(prof.target) + max_x;
  prof.pass =
      std::abs(prof.value.back() - prof.target - prof.boundary_term) <= 1e-12 * scale;
  return prof;
}

}  // namespace rbsde
