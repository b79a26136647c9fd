#pragma once

#include "rbsde/rbsde_f.hpp"

// Solutions on the enlarged filtration. A stopped solution is stored in
// compact pre-death/at-death form: alive values live on tree nodes (the state
// is alive at n when its death class exceeds n), the at-death value is the
// jump target, and everything is frozen after min(horizon, death).

namespace rbsde {

struct SolutionG {
  int T = 0;                // horizon (== depth in full-tree mode)
  bool full_tree = false;   // stopped at tau only (finite-tau model)
  AdaptedProcess aliveY;    // Y on alive states; level T holds the horizon payoff
  AdaptedProcess deadY;     // payoff at death: deadY.level(j) for death at j <= T
  PredictableProcess Z;     // Brownian integrand over alive steps
  PredictableProcess dK;    // reflection increments, carried into the death step
  AdaptedProcess dM_surv;   // default-martingale jump when step n is survived
  AdaptedProcess dM_death;  // default-martingale jump when death occurs at step n
  double scale = 1.0;       // 1 + max |Y|
};

// Value of a stopped alive/at-death pair at (state, level): alive values come
// from the path prefix, the at-death value is taken from level j at death,
// and everything is frozen after min(T, death).
double stopped_state_value(const AdaptedProcess& alive, const AdaptedProcess& dead, int T,
                           const EnlargedSpace& sp, std::size_t s, int n);

// Y at (state, level) under the solution's stopping rule.
double solution_y(const SolutionG& g, const EnlargedSpace& sp, std::size_t s, int n);

// Explicit transformation of the F-solution: Y = Y^F/Etilde while alive and
// the payoff after the stop, Z and K divided by the pre-jump Etilde (K keeps
// its increment on the death step), and the default-martingale part
// (h - Y^F/Etilde) . N^G with the integrand read at the jump time.
SolutionG lift_solution(const SolutionF& solF, const RandomTimeModel& rt,
                        const DataTriplet& data, int T, bool full_tree);

// Independent dynamic programming on the enlarged filtration under Qtilde,
// with conditional expectations computed by exact Bayes on atoms.
struct OracleG {
  int T = 0;
  AdaptedProcess aliveY;
  AdaptedProcess deadY;
};
OracleG solve_g_snell_oracle(const DataTriplet& data, const RandomTimeModel& rt,
                             const EnlargedSpace& space, int T, bool full_tree);

// max over (state, level) of |solution - oracle|.
double max_state_diff(const SolutionG& g, const OracleG& o, const EnlargedSpace& sp);

// Every stopped-solution invariant as one report: terminal value, barrier,
// one-step dynamics, Skorokhod pairing under Qtilde, the martingale property
// of the default part under both P and Qtilde, and constancy after the stop.
CheckReport residual_check(const SolutionG& g, const DataTriplet& data,
                           const RandomTimeModel& rt, const EnlargedSpace& space);

// Exhaustive enumeration over every stopping rule on the enlarged filtration
// (decisions on alive atoms); returns max E^Qtilde[stopped reward]. T <= 5.
double enumerate_g_stopping_max(const DataTriplet& data, const RandomTimeModel& rt,
                                const EnlargedSpace& space, int T);

}  // namespace rbsde
