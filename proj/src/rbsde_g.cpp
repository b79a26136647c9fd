#include "rbsde/rbsde_g.hpp"

#include <algorithm>
#include <cmath>

namespace rbsde {

double stopped_state_value(const AdaptedProcess& alive, const AdaptedProcess& dead, int T,
                           const EnlargedSpace& sp, std::size_t s, int n) {
  const int stop = sp.stop_level(s, T);
  const int l = std::min(n, stop);
  const std::uint64_t leaf = sp.leaf_of(s);
  const int j = sp.class_of(s);
  if (sp.dies_in_tree(s) && j <= T && l >= j)
    return dead.at(j, TreeModel::prefix(leaf, sp.depth, j));
  return alive.at(l, TreeModel::prefix(leaf, sp.depth, l));
}

namespace {

double max_abs2(const AdaptedProcess& a, const AdaptedProcess& b) {
  double s = 0.0;
  for (int n = 0; n <= a.depth(); ++n) {
    for (double v : a.level(n)) s = std::max(s, std::abs(v));
    for (double v : b.level(n)) s = std::max(s, std::abs(v));
  }
  return s;
}

CheckLine line(std::string name, double residual, double tol) {
  return CheckLine{std::move(name), residual, tol, residual <= tol};
}

// Driver accumulator along paths: Af_n = sum_{k<=n} f_{k-1} dt.
AdaptedProcess driver_accumulator(const DataTriplet& data, const TreeModel& tree, int T) {
  AdaptedProcess af(T);
  for (int k = 1; k <= T; ++k)
    for (std::size_t b = 0; b < af.level(k).size(); ++b)
      af.at(k, b) = af.at(k - 1, b >> 1) + data.f.at(k - 1, b >> 1) * tree.dt;
  return af;
}

}  // namespace

double solution_y(const SolutionG& g, const EnlargedSpace& sp, std::size_t s, int n) {
  return stopped_state_value(g.aliveY, g.deadY, g.T, sp, s, n);
}

SolutionG lift_solution(const SolutionF& solF, const RandomTimeModel& rt,
                        const DataTriplet& data, int T, bool full_tree) {
  if (solF.T != T) throw ConfigError("lift_solution: horizon mismatch");
  SolutionG g;
  g.T = T;
  g.full_tree = full_tree;
  g.aliveY = AdaptedProcess(T);
  g.deadY = AdaptedProcess(T);
  g.Z = PredictableProcess(T);
  g.dK = PredictableProcess(T);
  g.dM_surv = AdaptedProcess(T);
  g.dM_death = AdaptedProcess(T);

  for (int n = 0; n <= T; ++n) {
    auto ay = g.aliveY.level(n);
    auto dy = g.deadY.level(n);
    for (std::size_t b = 0; b < ay.size(); ++b) {
      ay[b] = n < T ? solF.Y.at(n, b) / rt.Etilde.at(n, b) : data.h.at(T, b);
      dy[b] = data.h.at(n, b);
    }
  }
  for (int n = 1; n <= T; ++n) {
    auto z = g.Z.step(n);
    auto dk = g.dK.step(n);
    for (std::size_t b = 0; b < z.size(); ++b) {
      const double epre = rt.Etilde.at(n - 1, b);
      z[b] = solF.Z.at(n, b) / epre;
      dk[b] = solF.dK.at(n, b) / epre;
    }
    auto ms = g.dM_surv.level(n);
    auto md = g.dM_death.level(n);
    const bool terminal = n == T;  // integrand vanishes at the horizon
    for (std::size_t b = 0; b < ms.size(); ++b) {
      if (terminal) {
        ms[b] = 0.0;
        md[b] = 0.0;
        continue;
      }
      const double gamma = solF.Y.at(n, b) / rt.Etilde.at(n, b);
      const double integrand = data.h.at(n, b) - gamma;
      const double x = rt.x(n, b);
      ms[b] = -integrand * x;
      md[b] = integrand * (1.0 - x);
    }
  }
  g.scale = 1.0 + max_abs2(g.aliveY, g.deadY);
  return g;
}

OracleG solve_g_snell_oracle(const DataTriplet& data, const RandomTimeModel& rt,
                             const EnlargedSpace& space, int T, bool full_tree) {
  if (full_tree && !rt.finite_tau)
    throw ConfigError("full-tree oracle requires a finite-tau model");
  const auto qm = qtilde_atom_masses(space, T);
  const auto af = driver_accumulator(data, rt.tree, T);

  OracleG o;
  o.T = T;
  o.aliveY = AdaptedProcess(T);
  o.deadY = AdaptedProcess(T);
  for (int j = 0; j <= T; ++j) {
    auto dy = o.deadY.level(j);
    for (std::size_t b = 0; b < dy.size(); ++b) dy[b] = data.h.at(j, b);
  }

  AdaptedProcess u(T);
  {
    auto ut = u.level(T);
    for (std::size_t b = 0; b < ut.size(); ++b) ut[b] = data.h.at(T, b) + af.at(T, b);
  }
  for (int n = T - 1; n >= 0; --n) {
    auto un = u.level(n);
    for (std::size_t b = 0; b < un.size(); ++b) {
      const double mass = qm.alive.at(n, b);
      if (!(mass > 0.0))
        throw ConstructionError("oracle conditioning on a null atom", n, b);
      double num = 0.0;
      for (int c = 0; c < 2; ++c) {
        const std::uint64_t v = (b << 1) | static_cast<std::uint64_t>(c);
        num += qm.die.at(n + 1, v) * (af.at(n + 1, v) + data.h.at(n + 1, v));
        num += qm.alive.at(n + 1, v) * u.at(n + 1, v);
      }
      double val = num / mass;
      if (!data.no_barrier()) val = std::max(data.S->at(n, b) + af.at(n, b), val);
      un[b] = val;
    }
  }
  for (int n = 0; n <= T; ++n) {
    auto ay = o.aliveY.level(n);
    for (std::size_t b = 0; b < ay.size(); ++b)
      ay[b] = n < T ? u.at(n, b) - af.at(n, b) : data.h.at(T, b);
  }
  return o;
}

double max_state_diff(const SolutionG& g, const OracleG& o, const EnlargedSpace& sp) {
  double worst = 0.0;
  for (std::size_t s = 0; s < sp.states(); ++s) {
    if (sp.pw[s] == 0.0) continue;
    for (int n = 0; n <= sp.depth; ++n)
      worst = std::max(worst, std::abs(solution_y(g, sp, s, n) -
                                       stopped_state_value(o.aliveY, o.deadY, o.T, sp, s, n)));
  }
  return worst;
}

CheckReport residual_check(const SolutionG& g, const DataTriplet& data,
                           const RandomTimeModel& rt, const EnlargedSpace& space) {
  CheckReport rep;
  const int T = g.T;
  const int N = space.depth;
  const TreeModel& tree = rt.tree;

  {  // terminal value equals the stopped payoff
    double worst = 0.0;
    for (std::size_t s = 0; s < space.states(); ++s) {
      if (space.pw[s] == 0.0) continue;
      const int stop = space.stop_level(s, T);
      const std::uint64_t node = TreeModel::prefix(space.leaf_of(s), N, stop);
      worst = std::max(worst, std::abs(solution_y(g, space, s, stop) - data.h.at(stop, node)));
    }
    rep.lines.push_back(line("terminal value Y = payoff at the stop", worst, 1e-14 * g.scale));
  }
  {  // barrier on alive states strictly before the stop
    double worst = 0.0;
    if (!data.no_barrier())
      for (int n = 0; n < T; ++n)
        for (std::size_t b = 0; b < g.aliveY.level(n).size(); ++b)
          if (rt.G.at(n, b) > 0.0)
            worst = std::max(worst, data.S->at(n, b) - g.aliveY.at(n, b));
    rep.lines.push_back(line(data.no_barrier() ? "barrier (none, vacuous)" : "barrier Y >= S",
                             worst, 1e-12 * g.scale));
  }
  {  // one-step dynamics and constancy after the stop
    double worst = 0.0, frozen = 0.0;
    for (std::size_t s = 0; s < space.states(); ++s) {
      if (space.pw[s] == 0.0) continue;
      const int stop = space.stop_level(s, T);
      const std::uint64_t leaf = space.leaf_of(s);
      const int j = space.class_of(s);
      double y_prev = solution_y(g, space, s, 0);
      for (int n = 1; n <= stop; ++n) {
        const std::uint64_t v = TreeModel::prefix(leaf, N, n);
        const std::uint64_t par = v >> 1;
        const bool died = space.dies_in_tree(s) && n == j;
        const double y = died ? g.deadY.at(n, v) : g.aliveY.at(n, v);
        const double dw = TreeModel::step_sign(v) * tree.sqrt_dt;
        const double dm = died ? g.dM_death.at(n, v) : g.dM_surv.at(n, v);
        const double r = y - y_prev + data.f.at(n - 1, par) * tree.dt + g.dK.at(n, par) -
                         g.Z.at(n, par) * dw - dm;
        worst = std::max(worst, std::abs(r));
        y_prev = y;
      }
      for (int n = stop + 1; n <= N; ++n)
        frozen = std::max(frozen, std::abs(solution_y(g, space, s, n) - y_prev));
    }
    rep.lines.push_back(line("one-step dynamics", worst, 1e-10 * g.scale));
    rep.lines.push_back(line("frozen after the stop", frozen, 0.0));
  }
  {  // Skorokhod pairing in Qtilde-expectation, plus worst complementary pair
    double pairing = 0.0, worst_pair = 0.0;
    if (!data.no_barrier()) {
      for (std::size_t s = 0; s < space.states(); ++s) {
        const double qw = space.qweight(s, T);
        if (qw == 0.0) continue;
        const int stop = space.stop_level(s, T);
        const std::uint64_t leaf = space.leaf_of(s);
        double acc = 0.0;
        for (int n = 1; n <= stop; ++n) {
          const std::uint64_t par = TreeModel::prefix(leaf, N, n - 1);
          const double gap = g.aliveY.at(n - 1, par) - data.S->at(n - 1, par);
          const double dk = g.dK.at(n, par);
          acc += gap * dk;
          worst_pair = std::max(worst_pair, std::min(dk, gap));
        }
        pairing += qw * acc;
      }
    }
    rep.lines.push_back(line("Skorokhod pairing (Qtilde)", std::abs(pairing), 1e-10 * g.scale));
    rep.lines.push_back(line("K grows only on the barrier", std::max(0.0, worst_pair),
                             1e-10 * g.scale));
  }
  {  // default martingale part under P and under Qtilde, on alive atoms
    double worst_p = 0.0, worst_q = 0.0;
    for (int n = 1; n <= T; ++n) {
      for (std::size_t b = 0; b < tree.nodes(n - 1); ++b) {
        const double gprev = rt.G.at(n - 1, b);
        if (!(gprev > 0.0)) continue;
        double acc_p = 0.0, acc_q = 0.0;
        for (int c = 0; c < 2; ++c) {
          const std::uint64_t v = (b << 1) | static_cast<std::uint64_t>(c);
          const double x = rt.x(n, v);
          acc_p += rt.dD.at(n, v) * g.dM_death.at(n, v) + rt.G.at(n, v) * g.dM_surv.at(n, v);
          acc_q += 0.5 * (x * g.dM_death.at(n, v) + (1.0 - x) * g.dM_surv.at(n, v));
        }
        worst_p = std::max(worst_p, std::abs(acc_p / (2.0 * gprev)));
        worst_q = std::max(worst_q, std::abs(acc_q));
      }
    }
    rep.lines.push_back(line("default martingale part (P)", worst_p, 1e-12 * g.scale));
    rep.lines.push_back(line("default martingale part (Qtilde)", worst_q, 1e-12 * g.scale));
  }
  return rep;
}

namespace {

std::vector<double> g_stopping_values(const DataTriplet& data, const QtildeAtomMasses& qm,
                                      const AdaptedProcess& af, int T, int n, std::uint64_t b) {
  if (n == T) return {data.h.at(T, b) + af.at(T, b)};
  std::vector<double> child[2];
  double fixed = 0.0;
  for (int c = 0; c < 2; ++c) {
    const std::uint64_t v = (b << 1) | static_cast<std::uint64_t>(c);
    fixed += qm.die.at(n + 1, v) * (af.at(n + 1, v) + data.h.at(n + 1, v));
    if (qm.alive.at(n + 1, v) > 0.0)
      child[c] = g_stopping_values(data, qm, af, T, n + 1, v);
    else
      child[c] = {0.0};  // no surviving mass: the child term drops out
  }
  const double mass = qm.alive.at(n, b);
  std::vector<double> out;
  out.reserve(child[0].size() * child[1].size() + 1);
  if (!data.no_barrier()) out.push_back(data.S->at(n, b) + af.at(n, b));
  for (double d : child[0])
    for (double a : child[1]) {
      const double num = fixed + qm.alive.at(n + 1, b << 1) * d +
                         qm.alive.at(n + 1, (b << 1) | 1) * a;
      out.push_back(num / mass);
    }
  return out;
}

}  // namespace

double enumerate_g_stopping_max(const DataTriplet& data, const RandomTimeModel& rt,
                                const EnlargedSpace& space, int T) {
  if (T > 5) throw ConfigError("stopping-rule enumeration is limited to T <= 5");
  const auto qm = qtilde_atom_masses(space, T);
  const auto af = driver_accumulator(data, rt.tree, T);
  const auto values = g_stopping_values(data, qm, af, T, 0, 0);
  return *std::max_element(values.begin(), values.end());
}

}  // namespace rbsde
