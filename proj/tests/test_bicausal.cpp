#include <doctest.h>

#include <cmath>
#include <map>

#include "aw/bicausal.hpp"
#include "aw/generators.hpp"
#include "aw/models.hpp"

using namespace aw;

namespace {

ScenarioTree one_step(double sigma) {
  ScenarioTree t;
  t.horizon = 1;
  t.add_root(0.0);
  t.add_child(0, sigma, 0.5);
  t.add_child(0, -sigma, 0.5);
  return t;
}

}  // namespace

TEST_CASE("pair_cost: diagonal of identical trees is zero") {
  Rng rng(51);
  RandomTreeSpec spec;
  const TreeData d(random_tree(rng, spec));
  const Matrix c = pair_cost(d, d, 2.0);
  for (Index i = 0; i < c.rows(); ++i) CHECK(c(i, i) == 0.0);
  CHECK((c.array() >= 0).all());
}

TEST_CASE("pair_cost: one-step walks, comonotone pair") {
  const TreeData P(one_step(0.4));
  const TreeData Q(one_step(0.9));
  const Matrix c = pair_cost(P, Q, 2.0);
  // Path order: up, down on both sides; matched signs cost (0.4-0.9)^2.
  CHECK(c(0, 0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(c(1, 1) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(c(0, 1) == doctest::Approx(1.69).epsilon(1e-14));
}

TEST_CASE("pair_cost of the small-noise counterexample pair") {
  const double eps = 0.05;
  const auto [Pe, P] = contraction_cex_pair(eps);
  const TreeData dPe(Pe), dP(P);
  const Matrix c = pair_cost(dPe, dP, 2.0);
  // Matched second coordinates: cost eps^2 (martingale) + eps^2 (drift).
  // Pe paths: (eps,1),(eps,-1),(-eps,1),(-eps,-1); P paths: (0,1),(0,-1).
  CHECK(c(0, 0) == doctest::Approx(2 * eps * eps).epsilon(1e-12));
  CHECK(c(1, 1) == doctest::Approx(2 * eps * eps).epsilon(1e-12));
  CHECK(c(3, 1) == doctest::Approx(2 * eps * eps).epsilon(1e-12));
}

TEST_CASE("AW(P, P) = 0 and returned couplings satisfy their invariants") {
  Rng rng(52);
  RandomTreeSpec spec;
  for (int rep = 0; rep < 5; ++rep) {
    const TreeData d(random_tree(rng, spec));
    for (double p : {1.0, 2.0}) {
      const AdaptedDistanceResult r = adapted_wasserstein_lp(d, d, p);
      REQUIRE(r.status == LpStatus::optimal);
      CHECK(r.value <= 1e-9);
      CHECK(r.coupling.max_invariant_residual() < 1e-9);
    }
  }
}

TEST_CASE("AW_2 of the small-noise pair equals eps sqrt(2)") {
  for (double eps : {0.01, 0.1, 0.5}) {
    const auto [Pe, P] = contraction_cex_pair(eps);
    const AdaptedDistanceResult r = adapted_wasserstein_lp(Pe, P, 2.0);
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.value == doctest::Approx(eps * std::sqrt(2.0)).epsilon(1e-9));
    CHECK(r.coupling.max_invariant_residual() < 1e-9);
  }
}

TEST_CASE("quantized walk pair reproduces the scaling identity value") {
  // sigma = (0.5, 1.5) vs (1.0, 1.0) over two steps: distance 0.5.
  const auto s1 = step_schedule({0.5, 1.5}, 0.5);
  const auto s2 = step_schedule({1.0, 1.0}, 0.5);
  const ScenarioTree A = random_walk_tree(2, s1);
  const ScenarioTree B = random_walk_tree(2, s2);
  CHECK(walk_scaling_identity(2, s1, s2) == doctest::Approx(0.5));

  const AdaptedDistanceResult lp = adapted_wasserstein_lp(A, B, 2.0);
  REQUIRE(lp.status == LpStatus::optimal);
  CHECK(lp.value == doctest::Approx(0.5).epsilon(1e-9));

  const double dp2 = adapted_wasserstein_dp_aw2(A, B);
  CHECK(dp2 * dp2 == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("backward recursion agrees with the LP on martingale instances") {
  Rng rng(53);
  RandomTreeSpec spec;
  spec.martingale = true;
  for (int rep = 0; rep < 10; ++rep) {
    spec.min_horizon = spec.max_horizon = rng.uniform_int(1, 3);
    spec.max_children = 3;
    const ScenarioTree A = random_tree(rng, spec);
    const ScenarioTree B = random_tree(rng, spec);
    const double lp = adapted_wasserstein_lp(A, B, 2.0).value;
    const double dp = adapted_wasserstein_dp_aw2(A, B);
    CHECK(std::abs(lp - dp) < 1e-8);
  }
}

TEST_CASE("backward recursion rejects non-martingale shortcuts") {
  ScenarioTree drifty;
  drifty.horizon = 1;
  drifty.add_root(0.0);
  drifty.add_child(0, 1.0, 0.7);
  drifty.add_child(0, -1.0, 0.3);
  CHECK_THROWS_AS(adapted_wasserstein_dp_aw2(drifty, drifty),
                  std::invalid_argument);
}

TEST_CASE("one-period trees collapse to classical transport") {
  Rng rng(54);
  RandomTreeSpec spec;
  spec.min_horizon = spec.max_horizon = 1;
  spec.martingale = true;
  for (int rep = 0; rep < 10; ++rep) {
    const TreeData A(random_tree(rng, spec));
    const TreeData B(random_tree(rng, spec));
    for (double p : {1.0, 2.0}) {
      const double aw = adapted_wasserstein_lp(A, B, p).value;
      const double w = wasserstein(A.law, B.law, p).value;
      CHECK(std::abs(aw - w) < 1e-9);
    }
  }
}

TEST_CASE("synchronous coupling: identity, optimality for walks, and gap") {
  Rng rng(55);
  RandomTreeSpec spec;
  const TreeData d(random_tree(rng, spec));
  const BiCausalCoupling diag = synchronous_coupling(d, d);
  CHECK(diag.max_invariant_residual() < 1e-12);
  CHECK(coupling_value(diag, d, d, 2.0) < 1e-12);

  // Time-dependent volatilities: the comonotone coupling is optimal.
  const auto s1 = step_schedule({0.7, 1.2, 0.4}, 1.0 / 3);
  const auto s2 = step_schedule({1.1, 0.5, 0.9}, 1.0 / 3);
  const TreeData A(random_walk_tree(3, s1));
  const TreeData B(random_walk_tree(3, s2));
  const BiCausalCoupling sync = synchronous_coupling(A, B);
  CHECK(sync.max_invariant_residual() < 1e-10);
  const double sync_value = coupling_value(sync, A, B, 2.0);
  const double lp_value = adapted_wasserstein_lp(A, B, 2.0).value;
  CHECK(sync_value == doctest::Approx(lp_value).epsilon(1e-9));
  CHECK(sync_value ==
        doctest::Approx(walk_scaling_identity(3, s1, s2)).epsilon(1e-9));
}

TEST_CASE("sign-dependent drifts defeat the synchronous coupling") {
  const double c = 2.0, sigma = 0.5;
  const auto [P, Q] = sign_drift_pair(c, sigma);
  const TreeData dP(P), dQ(Q);
  for (double p : {1.0, 2.0}) {
    const double sync_cost =
        std::pow(coupling_value(synchronous_coupling(dP, dQ), dP, dQ, p), p);
    const double flip_cost = std::pow(8 * sigma * sigma, p / 2);
    CHECK(sync_cost == doctest::Approx(std::pow(2 * c, p)).epsilon(1e-10));
    const AdaptedDistanceResult lp = adapted_wasserstein_lp(dP, dQ, p);
    CHECK(lp.expected_cost <= flip_cost + 1e-9);
    CHECK(lp.expected_cost < sync_cost - 1e-6);
  }
}

TEST_CASE("metric axioms on random triples") {
  Rng rng(56);
  RandomTreeSpec spec;
  spec.max_children = 3;
  for (int rep = 0; rep < 3; ++rep) {
    std::vector<ScenarioTree> triple;
    const int T = rng.uniform_int(2, 3);
    spec.min_horizon = spec.max_horizon = T;
    for (int i = 0; i < 3; ++i) triple.push_back(random_tree(rng, spec));
    for (double p : {1.0, 2.0}) {
      const MetricAxiomReport rep_p = check_metric_axioms(triple, p);
      CHECK(rep_p.passed(1e-7));
    }
  }
}

TEST_CASE("metric axioms: duplicates and scaled copies") {
  Rng rng(57);
  RandomTreeSpec spec;
  spec.min_horizon = spec.max_horizon = 2;
  const ScenarioTree base = random_tree(rng, spec);
  std::vector<ScenarioTree> list = {base, base, base.scaled(2.0)};
  const MetricAxiomReport rep = check_metric_axioms(list, 2.0);
  CHECK(rep.passed(1e-7));

  const TreeData a(base), b(base.scaled(2.0));
  const double ab = adapted_wasserstein_lp(a, b, 2.0).value;
  const double ba = adapted_wasserstein_lp(b, a, 2.0).value;
  CHECK(ab == doctest::Approx(ba).epsilon(1e-9));
  CHECK(adapted_wasserstein_lp(a, a, 2.0).value < 1e-9);
}

TEST_CASE("decomposition invariance under bi-causal couplings") {
  // Conditional mean of the P-side martingale increments given the joint
  // time-t history vanishes under any coupling the solver returns.
  Rng rng(58);
  RandomTreeSpec spec;
  spec.min_horizon = spec.max_horizon = 2;
  for (int rep = 0; rep < 5; ++rep) {
    const TreeData P(random_tree(rng, spec));
    const TreeData Q(random_tree(rng, spec));
    const AdaptedDistanceResult r = adapted_wasserstein_lp(P, Q, 1.0);
    REQUIRE(r.status == LpStatus::optimal);
    const BiCausalCoupling& pi = r.coupling;
    for (int t = 0; t < P.tree.horizon; ++t) {
      // Group leaf pairs by joint node pair at time t.
      std::map<std::pair<int, int>, std::pair<double, double>> acc;
      for (Index i = 0; i < pi.lawP.path_count(); ++i) {
        for (Index j = 0; j < pi.lawQ.path_count(); ++j) {
          const double w = pi.weights(i, j);
          if (w <= 0) continue;
          const auto key =
              std::make_pair(pi.lawP.nodes[i][t], pi.lawQ.nodes[j][t]);
          acc[key].first += w * P.decomp.martingale[pi.lawP.nodes[i][t + 1]];
          acc[key].second += w;
        }
      }
      for (const auto& [key, sums] : acc)
        if (sums.second > 1e-12)
          CHECK(std::abs(sums.first / sums.second) < 1e-8);
    }
  }
}

TEST_CASE("budget overflow raises an explicit size error") {
  Rng rng(59);
  RandomTreeSpec spec;
  spec.min_horizon = spec.max_horizon = 3;
  spec.max_children = 3;
  const TreeData A(random_tree(rng, spec));
  const TreeData B(random_tree(rng, spec));
  CHECK_THROWS_AS(adapted_wasserstein_lp(A, B, 2.0, 10),
                  std::length_error);
}

TEST_CASE("lemma 3.7 style domination of the plain distance") {
  // W_p(P,Q)^p <= 2^{p-1} b_p E[c_p] at the adapted-optimal coupling.
  Rng rng(60);
  RandomTreeSpec spec;
  spec.max_children = 3;
  for (int rep = 0; rep < 5; ++rep) {
    const int T = rng.uniform_int(1, 3);
    spec.min_horizon = spec.max_horizon = T;
    const TreeData P(random_tree(rng, spec));
    const TreeData Q(random_tree(rng, spec));
    for (double p : {1.0, 2.0}) {
      const double w = wasserstein(P.law, Q.law, p).value;
      const AdaptedDistanceResult aw = adapted_wasserstein_lp(P, Q, p);
      const double bound = std::pow(2.0, p - 1) * ConstantsLedger::bdg(p) *
                           aw.expected_cost;
      CHECK(std::pow(w, p) <= bound + 1e-7);
    }
  }
}
