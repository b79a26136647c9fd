#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "rbsde/tree.hpp"

// The random time tau is specified by its conditional law given the full
// Brownian path: a density kernel alpha with alpha_j = P(tau = t_j | F_N) per
// leaf and alpha_inf = P(tau > t_N | F_N). Everything else -- the survival
// processes G and Gtilde, the dual optional projection, the martingale m, the
// survival discount Etilde, the density Ztilde of the measure change and the
// enlarged state space -- is computed exactly from it.

namespace rbsde {

struct DensityKernel {
  int depth = 0;
  bool finite_tau = false;  // requires alpha_inf == 0; G vanishes at the last level
  // Row-major per leaf: entry j = 0..depth is alpha_j, entry depth+1 is alpha_inf.
  std::vector<double> alpha;

  int classes() const { return depth + 2; }
  double a(std::uint64_t leaf, int j) const { return alpha[leaf * classes() + j]; }
  double a_inf(std::uint64_t leaf) const { return alpha[leaf * classes() + depth + 1]; }
  double& entry(std::uint64_t leaf, int j) { return alpha[leaf * classes() + j]; }

  // Nonnegativity and unit row mass (1e-14); finite-tau rows must put no mass
  // beyond the tree (tiny residue is zeroed in place).
  void validate();
};

struct RandomTimeModel {
  TreeModel tree;
  DensityKernel kernel;
  bool finite_tau = false;
  AdaptedProcess G;       // P(tau > t_n | F_n), the Azema supermartingale
  AdaptedProcess Gtilde;  // P(tau >= t_n | F_n) = G + dD
  AdaptedProcess dD;      // jump of the dual optional projection, E[alpha_n | F_n]
  AdaptedProcess D;       // cumulative dual optional projection along each path
  AdaptedProcess m;       // G + D, an F-martingale
  AdaptedProcess Etilde;  // Doleans-Dade exponential of -(1/Gtilde).D^{o,F}; the
                          // time-0 jump is excluded so Etilde_0 = 1 and the
                          // time-0 default mass enters only through G_0 < 1
  AdaptedProcess Em;      // Doleans-Dade exponential of (1/G_-).m
  AdaptedProcess Ztilde;  // 1/Em, density process of the measure change
  AdaptedProcess VF;      // 1 - Etilde, nondecreasing

  double g0() const { return G.at(0, 0); }
  // Fraction of the pre-death survival mass consumed at step n.
  double x(int n, std::uint64_t b) const { return dD.at(n, b) / Gtilde.at(n, b); }
  // VF jump at a level-n node, n >= 1 (exact difference of Etilde values).
  double dVF(int n, std::uint64_t b) const {
    return Etilde.at(n - 1, b >> 1) - Etilde.at(n, b);
  }
};

// Throws ConstructionError naming the node when positivity fails: G must stay
// positive on every node, except that in finite-tau mode the last level has
// G = 0 and instead Gtilde must stay positive there.
RandomTimeModel build_random_time(const TreeModel& tree, DensityKernel kernel);

// Enlarged probability space: one state per (leaf path, death class), where
// death class j <= depth means tau = t_j and class depth+1 means tau beyond
// the tree horizon.
struct EnlargedSpace {
  const RandomTimeModel* rt = nullptr;
  int depth = 0;
  int classes = 0;
  std::vector<double> pw;  // P-weight 2^-depth * alpha_j per state

  std::size_t states() const { return pw.size(); }
  std::uint64_t leaf_of(std::size_t s) const { return s / classes; }
  int class_of(std::size_t s) const { return static_cast<int>(s % classes); }
  bool dies_in_tree(std::size_t s) const { return class_of(s) <= depth; }
  std::size_t state(std::uint64_t leaf, int cls) const { return leaf * classes + cls; }

  // Level at which a state is stopped for horizon T: min(T, death level).
  int stop_level(std::size_t s, int T) const {
    const int j = class_of(s);
    return j <= depth ? std::min(T, j) : T;
  }
  // Weight under Qtilde_T: pw * Ztilde at the stopped level.
  double qweight(std::size_t s, int T) const {
    const int l = stop_level(s, T);
    return pw[s] * rt->Ztilde.at(l, TreeModel::prefix(leaf_of(s), depth, l));
  }
};

EnlargedSpace build_enlarged_space(const RandomTimeModel& model);

// Exact E^{Qtilde_T}[X] of a per-state payoff.
double qtilde_expectation(const EnlargedSpace& space, std::span<const double> per_state, int T);

// Unnormalized Qtilde_T atom masses for Bayes conditioning on alive atoms.
// die(n, v): mass of states dying exactly at n under the level-n node v;
// alive(n, b): mass of states alive strictly after n under the level-n node b,
// built backward so alive(n, b) = sum over children of (die + alive)(n+1, .).
struct QtildeAtomMasses {
  int T = 0;
  AdaptedProcess die;
  AdaptedProcess alive;
};
QtildeAtomMasses qtilde_atom_masses(const EnlargedSpace& space, int T);

// max over alive atoms at level n of
//   | E[xi | G_n] - E[xi I_{n<tau} | F_n] / G_n |
// where xi is the level-m slice of X (m >= n; m == n is the optional
// projection conversion for adapted processes).
double check_g_projection(const EnlargedSpace& space, const AdaptedProcess& X, int m, int n);

// One-step martingale residuals over alive atoms.
double ng_martingale_residual(const EnlargedSpace& space);               // N^G under P
double ztilde_martingale_residual(const EnlargedSpace& space);           // Ztilde^tau under P
double w_qtilde_martingale_residual(const EnlargedSpace& space, int T);  // W^{T^tau} under Qtilde

struct CheckLine {
  std::string name;
  double residual = 0.0;
  double tol = 0.0;
  bool pass = false;
};

struct CheckReport {
  std::vector<CheckLine> lines;
  bool all_pass() const {
    return std::all_of(lines.begin(), lines.end(), [](const CheckLine& l) { return l.pass; });
  }
  double worst() const {
    double w = 0.0;
    for (const auto& l : lines) w = std::max(w, l.residual / (l.tol > 0 ? l.tol : 1.0));
    return w;
  }
};

// Battery of the exact structural identities for one model: the martingale
// property of m, Gtilde = G_- + dm, Gtilde - dD = G, the multiplicative
// decomposition G = G_0 E((1/G_-).m) Etilde, reciprocal Ztilde Em = 1,
// monotone VF, Qtilde normalization for every horizon up to T, the three
// one-step martingales, the survival-weighted payoff transfer identities on
// seeded payoffs, and the G-projection conversion. Residual tolerances are
// 1e-12 times a per-line scale.
CheckReport check_identities(const RandomTimeModel& rt, const EnlargedSpace& space, int T,
                             std::uint64_t seed);

// Per-step jump of Vtilde^{(a)}: 1 - (1-x)^a, computed in log space near x = 1.
double dv_tilde(double x, double a);

// Compensator bound checks on alive atoms: the conditional mass of dual
// projection increments over (t-1, T^tau] is at most Gtilde_t under Qtilde;
// the Gtilde-normalized increment mass over (t, T^tau] is at most 1 under P;
// and max(a,1)*x - dVtilde^{(a)} >= 0 pathwise for every a in a_grid.
CheckReport check_compensator_bounds(const EnlargedSpace& space, int T,
                                     std::span<const double> a_grid);

}  // namespace rbsde
