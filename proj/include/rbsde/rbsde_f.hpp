#pragma once

#include <optional>

#include "rbsde/random_time.hpp"

// Reference-filtration reflected BSDE: backward Snell induction on the tree
// for the survival-discounted data, with the reflection compensator extracted
// at the parent (predictable) and the Brownian integrand from the exact
// martingale representation.

namespace rbsde {

struct DataTriplet {
  AdaptedProcess f;  // driver rate; the level-n value acts over step n+1
  std::optional<AdaptedProcess> S;  // lower barrier; nullopt = no barrier
  AdaptedProcess h;  // payoff process; the claim pays h at the stopped time

  bool no_barrier() const { return !S.has_value(); }
};

// Checks h >= S at every state the stopped claim can actually occupy
// (death nodes with positive mass, horizon nodes still alive).
void validate_triplet(const DataTriplet& data, const RandomTimeModel& rt, int T);

struct TransformedDataF {
  int T = 0;
  bool terminal_zero = false;  // full-tree variant with zero terminal value
  AdaptedProcess fF;           // Etilde_n f_n
  std::optional<AdaptedProcess> SF;  // Etilde_n S_n
  std::vector<double> xiF;           // Etilde_T h_T per level-T node
  AdaptedProcess dA;  // reward increments fF_{k-1} dt + h_k dVF_k at level k
};

TransformedDataF transform_data(const DataTriplet& data, const RandomTimeModel& rt, int T);

// Full-tree variant: zero terminal value, barrier must satisfy SF <= 0 at the
// last level (throws ContractError "barrier violates terminal condition").
TransformedDataF transform_data_infinite(const DataTriplet& data, const RandomTimeModel& rt);

struct SolutionF {
  int T = 0;
  bool no_barrier = true;
  AdaptedProcess Y;         // levels 0..T
  PredictableProcess Z;     // steps 1..T
  PredictableProcess dK;    // steps 1..T, nonnegative increments
  AdaptedProcess A;         // cumulative reward accumulator (A_0 = 0)
  double max_dyn_residual = 0.0;
  double scale = 1.0;       // 1 + max |Y|
};

SolutionF solve_f_rbsde(const TransformedDataF& data, const TreeModel& tree);

// Same induction with terminal value A_N; requires data.terminal_zero.
SolutionF solve_f_rbsde_infinite(const TransformedDataF& data, const TreeModel& tree);

struct SkorokhodReport {
  double pairing_sum = 0.0;   // sum (Y - SF) dK
  double worst_pair = 0.0;    // max min(dK, Y - SF) over steps
  bool pass = true;
};
SkorokhodReport verify_skorokhod(const SolutionF& sol, const TransformedDataF& data);

// Exhaustive enumeration over every stopping rule of E[A_sigma + reward]:
// returns the maximum. Cost grows doubly exponentially; guarded to T <= 5.
double enumerate_f_stopping_max(const TransformedDataF& data, const TreeModel& tree);

}  // namespace rbsde
