#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "rbsde/rbsde_f.hpp"

using namespace rbsde;
using rbsde::testing::random_kernel;
using rbsde::testing::reference_kernel;

namespace {

AdaptedProcess constant_process(int depth, double c) {
  AdaptedProcess x(depth);
  for (int n = 0; n <= depth; ++n)
    for (double& v : x.level(n)) v = c;
  return x;
}

// Kernel with no default risk inside the tree: everything survives.
DensityKernel immortal_kernel(int depth) {
  DensityKernel k;
  k.depth = depth;
  k.alpha.assign((std::size_t{1} << depth) * (depth + 2), 0.0);
  for (std::uint64_t w = 0; w < (std::uint64_t{1} << depth); ++w)
    k.entry(w, depth + 1) = 1.0;
  return k;
}

}  // namespace

TEST_CASE("transform_data: no-default limit recovers the plain data") {
  const TreeModel tree = TreeModel::build(3, 0.5);
  const auto rt = build_random_time(tree, immortal_kernel(3));
  DataTriplet data;
  data.f = constant_process(3, 0.7);
  data.h = brownian_process(tree);
  data.S = constant_process(3, -5.0);
  const auto tf = transform_data(data, rt, 3);
  for (int n = 0; n <= 3; ++n)
    for (std::size_t b = 0; b < tf.fF.level(n).size(); ++b) {
      CHECK(tf.fF.at(n, b) == data.f.at(n, b));
      CHECK(tf.SF->at(n, b) == data.S->at(n, b));
    }
  for (std::size_t b = 0; b < tf.xiF.size(); ++b) CHECK(tf.xiF[b] == data.h.at(3, b));
  for (int k = 1; k <= 3; ++k)
    for (std::size_t b = 0; b < tf.dA.level(k).size(); ++b)
      CHECK(tf.dA.at(k, b) == doctest::Approx(0.7 * tree.dt).epsilon(1e-15));
}

TEST_CASE("transform_data on the reference kernel") {
  const TreeModel tree = TreeModel::build(2, 1.0);
  const auto rt = build_random_time(tree, reference_kernel());
  DataTriplet data;
  data.f = constant_process(2, 0.0);
  data.h = constant_process(2, 1.0);
  const auto tf = transform_data(data, rt, 2);
  CHECK(tf.xiF[0] == doctest::Approx(0.3125).epsilon(1e-15));
  CHECK(tf.xiF[1] == doctest::Approx(5.0 / 12.0).epsilon(1e-14));
  CHECK(tf.xiF[2] == doctest::Approx(0.3125).epsilon(1e-15));
  CHECK(tf.xiF[3] == doctest::Approx(5.0 / 12.0).epsilon(1e-14));

  DataTriplet scaled;
  scaled.f = constant_process(2, 0.0);
  scaled.h = constant_process(2, 4.0);
  const auto tf2 = transform_data(scaled, rt, 2);
  for (std::size_t b = 0; b < 4; ++b)
    CHECK(tf2.xiF[b] == doctest::Approx(4.0 * rt.Etilde.at(2, b)).epsilon(1e-15));
}

TEST_CASE("one-step reflected solve by hand") {
  const TreeModel tree = TreeModel::build(1, 1.0);
  const auto rt = build_random_time(tree, immortal_kernel(1));
  DataTriplet data;
  data.f = constant_process(1, 0.0);
  data.h = AdaptedProcess(1);
  data.h.at(1, 1) = 1.0;  // up
  data.h.at(1, 0) = 3.0;  // down
  data.S = AdaptedProcess(1);
  data.S->at(0, 0) = 5.0;
  data.S->at(1, 0) = 0.0;
  data.S->at(1, 1) = 0.0;
  validate_triplet(data, rt, 1);
  const auto tf = transform_data(data, rt, 1);
  const auto sol = solve_f_rbsde(tf, tree);
  CHECK(sol.Y.at(0, 0) == 5.0);
  CHECK(sol.dK.at(1, 0) == 3.0);
  CHECK(sol.Z.at(1, 0) == -1.0);
  const auto sk = verify_skorokhod(sol, tf);
  CHECK(sk.pass);
  CHECK(sk.pairing_sum == 0.0);  // Y_0 - S_0 = 0 exactly where K grows

  // Barrier above the terminal payoff at a reachable state must be rejected.
  DataTriplet bad = data;
  bad.S->at(1, 1) = 2.0;  // h = 1 < S there
  CHECK_THROWS_AS(validate_triplet(bad, rt, 1), ContractError);
}

TEST_CASE("constant vulnerable claim: Y^F = c Etilde exactly") {
  const TreeModel tree = TreeModel::build(2, 1.0);
  const auto rt = build_random_time(tree, reference_kernel());
  DataTriplet data;
  data.f = constant_process(2, 0.0);
  data.h = constant_process(2, 2.5);
  const auto sol = solve_f_rbsde(transform_data(data, rt, 2), tree);
  for (int n = 0; n <= 2; ++n)
    for (std::size_t b = 0; b < sol.Y.level(n).size(); ++b)
      CHECK(sol.Y.at(n, b) == doctest::Approx(2.5 * rt.Etilde.at(n, b)).epsilon(1e-14));
  for (int k = 1; k <= 2; ++k)
    for (std::size_t b = 0; b < sol.Z.step(k).size(); ++b) {
      CHECK(std::abs(sol.Z.at(k, b)) <= 1e-14);
      CHECK(sol.dK.at(k, b) == 0.0);
    }
  CHECK(sol.max_dyn_residual <= 1e-12);
}

TEST_CASE("Snell value equals the exhaustive stopping-rule maximum") {
  const TreeModel tree = TreeModel::build(2, 1.0);
  const auto rt = build_random_time(tree, reference_kernel());
  const auto W = brownian_process(tree);
  DataTriplet data;
  data.f = constant_process(2, 0.0);
  data.h = AdaptedProcess(2);
  data.S = AdaptedProcess(2);
  for (int n = 0; n <= 2; ++n)
    for (std::size_t b = 0; b < W.level(n).size(); ++b) {
      const double plus = std::max(W.at(n, b), 0.0);
      data.h.at(n, b) = plus;
      data.S->at(n, b) = plus;
    }
  validate_triplet(data, rt, 2);
  const auto tf = transform_data(data, rt, 2);
  const auto sol = solve_f_rbsde(tf, tree);
  const double best = enumerate_f_stopping_max(tf, tree);
  CHECK(std::abs(best - sol.Y.at(0, 0)) <= 1e-12 * sol.scale);
}

TEST_CASE("put-style barrier binds: reflected value beats continuation, matches enumeration") {
  const TreeModel tree = TreeModel::build(4, 0.5);
  const auto rt = build_random_time(tree, random_kernel(4, 19, false, true));
  const auto W = brownian_process(tree);
  DataTriplet d;
  d.f = constant_process(4, -0.2);
  d.h = AdaptedProcess(4);
  for (int n = 0; n <= 4; ++n)
    for (std::size_t b = 0; b < d.h.level(n).size(); ++b)
      d.h.at(n, b) = std::max(1.5 - W.at(n, b), 0.0);
  d.S = d.h;
  validate_triplet(d, rt, 4);
  const auto tf = transform_data(d, rt, 4);
  const auto sol = solve_f_rbsde(tf, tree);
  double ktotal = 0.0;
  for (int k = 1; k <= 4; ++k)
    for (double v : sol.dK.step(k)) ktotal += v;
  CHECK(ktotal > 0.01);  // the barrier genuinely binds
  CHECK(sol.max_dyn_residual <= 1e-12 * sol.scale);
  CHECK(verify_skorokhod(sol, tf).pass);
  const double best = enumerate_f_stopping_max(tf, tree);
  CHECK(std::abs(best - sol.Y.at(0, 0)) <= 1e-12 * sol.scale);
}

TEST_CASE("solver output dominates under dominated data (comparison)") {
  const TreeModel tree = TreeModel::build(4, 0.5);
  const auto rt = build_random_time(tree, random_kernel(4, 21, false, false));
  Rng rng(3);
  DataTriplet hi, lo;
  hi.f = AdaptedProcess(4);
  hi.h = AdaptedProcess(4);
  hi.S = AdaptedProcess(4);
  lo.f = AdaptedProcess(4);
  lo.h = AdaptedProcess(4);
  lo.S = AdaptedProcess(4);
  for (int n = 0; n <= 4; ++n)
    for (std::size_t b = 0; b < hi.f.level(n).size(); ++b) {
      hi.f.at(n, b) = rng.normal();
      hi.h.at(n, b) = 1.0 + std::abs(rng.normal());
      hi.S->at(n, b) = hi.h.at(n, b) - 1.0 - std::abs(rng.normal());
      lo.f.at(n, b) = hi.f.at(n, b) - std::abs(rng.normal());
      lo.h.at(n, b) = hi.h.at(n, b) - 0.5;
      lo.S->at(n, b) = lo.h.at(n, b) - 1.0 - std::abs(rng.normal());
      lo.S->at(n, b) = std::min(lo.S->at(n, b), hi.S->at(n, b));
    }
  const auto yh = solve_f_rbsde(transform_data(hi, rt, 4), tree);
  const auto yl = solve_f_rbsde(transform_data(lo, rt, 4), tree);
  for (int n = 0; n <= 4; ++n)
    for (std::size_t b = 0; b < yh.Y.level(n).size(); ++b)
      CHECK(yh.Y.at(n, b) >= yl.Y.at(n, b) - 1e-12 * yh.scale);
}

TEST_CASE("full-tree solve with zero data and with constant claims") {
  const TreeModel tree = TreeModel::build(2, 1.0);
  const auto rt = build_random_time(tree, reference_kernel(true));
  SUBCASE("zero data gives the zero solution") {
    DataTriplet z;
    z.f = constant_process(2, 0.0);
    z.h = constant_process(2, 0.0);
    z.S = constant_process(2, -1.0);
    const auto sol = solve_f_rbsde_infinite(transform_data_infinite(z, rt), tree);
    for (int n = 0; n <= 2; ++n)
      for (double v : sol.Y.level(n)) CHECK(v == 0.0);
    for (int k = 1; k <= 2; ++k)
      for (std::size_t b = 0; b < sol.Z.step(k).size(); ++b) {
        CHECK(sol.Z.at(k, b) == 0.0);
        CHECK(sol.dK.at(k, b) == 0.0);
      }
  }
  SUBCASE("constant claim prices to c when all mass dies in the tree") {
    DataTriplet c;
    c.f = constant_process(2, 0.0);
    c.h = constant_process(2, 1.0);
    const auto sol = solve_f_rbsde_infinite(transform_data_infinite(c, rt), tree);
    CHECK(sol.Y.at(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    // Against the direct tail sum E[sum_k h_k dVF_k | F_n].
    for (int n = 0; n <= 2; ++n)
      for (std::size_t b = 0; b < sol.Y.level(n).size(); ++b)
        CHECK(sol.Y.at(n, b) ==
              doctest::Approx(rt.VF.at(2, 0) == 1.0
                                  ? 1.0 - rt.VF.at(n, b)
                                  : 0.0)
                  .epsilon(1e-14));
  }
}

TEST_CASE("full-tree solve matches a direct summation oracle on random payoffs") {
  const TreeModel tree = TreeModel::build(5, 0.5);
  const auto rt = build_random_time(tree, random_kernel(5, 77, true, false));
  const auto W = brownian_process(tree);
  DataTriplet data;
  data.f = constant_process(5, 0.0);
  data.h = AdaptedProcess(5);
  for (int n = 0; n <= 5; ++n)
    for (std::size_t b = 0; b < data.h.level(n).size(); ++b)
      data.h.at(n, b) = std::max(W.at(n, b), 0.0);
  const auto sol = solve_f_rbsde_infinite(transform_data_infinite(data, rt), tree);
  // Direct: Y_0 = E[sum_k h_k dVF_k].
  std::vector<double> acc(tree.leaves());
  for (std::uint64_t leaf = 0; leaf < tree.leaves(); ++leaf) {
    double s = 0.0;
    for (int k = 1; k <= 5; ++k) {
      const auto v = TreeModel::prefix(leaf, 5, k);
      s += data.h.at(k, v) * rt.dVF(k, v);
    }
    acc[leaf] = s;
  }
  CHECK(sol.Y.at(0, 0) == doctest::Approx(expectation(acc, 5)).epsilon(1e-13));
}
