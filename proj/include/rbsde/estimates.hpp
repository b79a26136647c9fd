#pragma once

#include "rbsde/rbsde_g.hpp"
#include "rbsde/rng.hpp"

// Solution and data norms, the a-priori estimate diagnostics (finite ratios,
// horizon profiles), and the provable inequalities with explicit constants:
// the discounting lemma with kappa(a), the nondecreasing tail bound with
// 2 G0^{-1/r}, and the martingale Hoelder inequality (empirical constant).

namespace rbsde {

enum class Measure { P, Qtilde };

struct NormReport {
  double p = 2.0;
  Measure measure = Measure::Qtilde;
  int T = 0;       // solution horizon
  int window = 0;  // evaluation window (<= T)
  double yNorm = 0.0, zNorm = 0.0, mNorm = 0.0, kNorm = 0.0;
  double dataNorm = 0.0;
  double ratio = 0.0;  // (y+z+m+k)/dataNorm, 0 when dataNorm == 0
};

// Exact state-sum norms of a stopped solution: sup-then-Lp for Y, quadratic
// sums for Z and M, total variation for K, and the data aggregate
// |xi| + int |f| + sup S^+ under the same measure.
NormReport solution_norms(const SolutionG& sol, const DataTriplet& data,
                          const RandomTimeModel& rt, const EnlargedSpace& space, double p,
                          Measure mu, int window = -1);

struct AprioriReport {
  std::vector<NormReport> per_horizon;  // horizons 1..T
  double max_ratio = 0.0;
  bool finite = true;
};
// Solves the same data family at every horizon 1..T and reports the ratio
// profile; the engine asserts finiteness and emits the profile, it does not
// pin a constant.
AprioriReport verify_apriori_bounded(const DataTriplet& data, const RandomTimeModel& rt,
                                     const EnlargedSpace& space, double p, int T);

struct StabilityReport {
  double lhs = 0.0;        // |dY|_D + |dZ|_S + |dM|_M under Qtilde
  double delta_rhs = 0.0;  // Delta(d_xi, d_f, d_S)
  double cross_rhs = 0.0;  // sqrt(|dS|_D) * sqrt(sum Delta_i)
  double ratio = 0.0;
  bool finite = true;
};
StabilityReport verify_stability(const SolutionG& solA, const SolutionG& solB,
                                 const DataTriplet& dataA, const DataTriplet& dataB,
                                 const RandomTimeModel& rt, const EnlargedSpace& space,
                                 double p);

struct DiscountedReport {
  double lhs = 0.0;  // P-norms of the survival-discounted quadruplet
  double rhs = 0.0;  // Delta_Qtilde(xi, f, S^+)
  double ratio = 0.0;
  bool finite = true;
};
DiscountedReport verify_discounted(const SolutionG& sol, const DataTriplet& data,
                                   const RandomTimeModel& rt, const EnlargedSpace& space,
                                   double p);

// kappa(a) = 3^{1/a} (5 + max(a, 1/a)^{1/a}).
double kappa(double a);

// Stopped G-adapted test processes share the solution layout: a value while
// alive, a value at death, frozen afterwards.
struct StoppedGProcess {
  AdaptedProcess alive;
  AdaptedProcess death;
};
// Per-step jump amounts on the enlarged filtration (zero after death).
struct GIncrements {
  AdaptedProcess surv;   // jump when step n is survived
  AdaptedProcess death;  // jump when death occurs at step n
};

// Seeded generators for the property suites.
struct ProcessGen {
  explicit ProcessGen(std::uint64_t seed) : rng(seed) {}
  Rng rng;
  AdaptedProcess adapted(const TreeModel& tree, double loc = 0.0, double scale = 1.0);
  AdaptedProcess martingale(const TreeModel& tree);       // from iid leaf values
  AdaptedProcess nondecreasing(const TreeModel& tree);    // X_0 = 0, |N(0,1)| increments
  StoppedGProcess g_process(const TreeModel& tree);       // arbitrary G-semimartingale
  GIncrements g_nonneg_increments(const TreeModel& tree); // nonnegative jump amounts
};

// The discounting lemma, instance-tested with its explicit constants:
// (a) E[sup Etilde |Y|^p] <= G0^{-1} E^Qtilde[sup |Y|^p];
// (b) E[(int Etilde_-^a dK)^{1/a}] <= kappa(a)/G0 E^Qtilde[K^{1/a} + sum Gtilde dK^{1/a}]
//     for a in {1/p, 2/p};
// (c) the N^G-bracket inequality for G-optional weights with kappa(2/p);
// (d) its F-optional variant with the factor-2 compensator term.
CheckReport verify_lemma_discounting(const RandomTimeModel& rt, const EnlargedSpace& space,
                                     double p, int T, std::uint64_t seed, int instances);

// || (Etilde_- . X)_T ||_{L^r(P)} <= 2 G0^{-1/r} || X_{T^tau} ||_{L^r(Qtilde)}
// on seeded nondecreasing X with X_0 = 0.
CheckReport verify_tail_bound(const RandomTimeModel& rt, const EnlargedSpace& space, double r,
                              int T, std::uint64_t seed, int instances);

// || sup |(H.M)| ||_r <= kappa || sup|X| ||_a || [M]^{1/2} ||_b with
// 1/r = 1/a + 1/b and |H| <= |X_-|: reports the empirical max ratio over
// seeded triplets (the lemma asserts existence of kappa, not a value).
struct HolderReport {
  double max_ratio = 0.0;
  int evaluated = 0;
};
HolderReport verify_holder_inequality(const TreeModel& tree, std::uint64_t seed, int nseeds,
                                         double a, double b);

}  // namespace rbsde
