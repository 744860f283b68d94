#include <doctest.h>

#include <cmath>

#include "aw/doob.hpp"
#include "aw/generators.hpp"

using namespace aw;

namespace {

ScenarioTree remark_tree(int n) {
  ScenarioTree t;
  t.horizon = 2;
  t.add_root(0.0);
  const int up = t.add_child(0, 1.0 / n, 0.5);
  const int dn = t.add_child(0, -1.0 / n, 0.5);
  t.add_child(up, 1.0, 0.5);
  t.add_child(up, 0.0, 0.5);
  t.add_child(dn, 0.0, 0.5);
  t.add_child(dn, -1.0, 0.5);
  return t;
}

// Brute-force conditional expectation of the next value given a node.
double conditional_mean(const ScenarioTree& t, int u) {
  double m = 0;
  for (int c : t.nodes[u].children) m += t.nodes[c].prob * t.nodes[c].value;
  return m;
}

}  // namespace

TEST_CASE("symmetric one-step walk has zero drift") {
  ScenarioTree t;
  t.horizon = 1;
  t.add_root(0.0);
  t.add_child(0, 1.0, 0.5);
  t.add_child(0, -1.0, 0.5);
  const Decomposition d = doob_decompose(t);
  CHECK(d.drift[0] == 0.0);
  CHECK(d.martingale[1] == 1.0);
  CHECK(d.martingale[2] == -1.0);
}

TEST_CASE("deterministic chain is all drift") {
  ScenarioTree t;
  t.horizon = 2;
  const int a = t.add_root(0.0);
  const int b = t.add_child(a, 0.3, 1.0);
  t.add_child(b, 0.6, 1.0);
  const Decomposition d = doob_decompose(t);
  CHECK(d.drift[a] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(d.drift[b] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(std::abs(d.martingale[1]) < 1e-15);
  CHECK(std::abs(d.martingale[2]) < 1e-15);
}

TEST_CASE("kinked two-period model: drift at the 1/n node") {
  const int n = 5;
  const ScenarioTree t = remark_tree(n);
  const Decomposition d = doob_decompose(t);
  // Node with value 1/n and children {1, 0}: conditional mean 1/2,
  // so the drift increment is 1/2 - 1/n.
  const int up = 1;
  CHECK(d.drift[up] == doctest::Approx(0.5 - 1.0 / n).epsilon(1e-14));
  // Cross-check against the direct conditional-expectation oracle.
  CHECK(d.drift[up] ==
        doctest::Approx(conditional_mean(t, up) - t.nodes[up].value));
}

TEST_CASE("decomposition reconstructs increments and is a martingale") {
  Rng rng(21);
  RandomTreeSpec spec;
  for (int rep = 0; rep < 20; ++rep) {
    const ScenarioTree t = random_tree(rng, spec);
    const Decomposition d = doob_decompose(t);
    CHECK(martingale_residual(t, d) < 1e-10);
    for (size_t c = 1; c < t.nodes.size(); ++c) {
      const int parent = t.nodes[c].parent;
      const double inc = t.nodes[c].value - t.nodes[parent].value;
      CHECK(std::abs(d.martingale[c] + d.drift[parent] - inc) < 1e-12);
    }
  }
}

TEST_CASE("decomposition is deterministic") {
  Rng rng(22);
  RandomTreeSpec spec;
  const ScenarioTree t = random_tree(rng, spec);
  const Decomposition d1 = doob_decompose(t);
  const Decomposition d2 = doob_decompose(t);
  CHECK(d1.drift == d2.drift);
  CHECK(d1.martingale == d2.martingale);
}

TEST_CASE("seminorm: constant tree and one-step martingale") {
  CHECK(seminorm(constant_tree(3, 1.0), 2.0) == 0.0);

  ScenarioTree t;
  t.horizon = 1;
  t.add_root(0.0);
  const double sigma = 0.7;
  t.add_child(0, sigma, 0.5);
  t.add_child(0, -sigma, 0.5);
  CHECK(seminorm(t, 2.0) == doctest::Approx(sigma).epsilon(1e-14));
  CHECK_THROWS(seminorm(t, 0.5));
}

TEST_CASE("seminorm of the kinked model matches path enumeration") {
  const int n = 2;
  const ScenarioTree t = remark_tree(n);
  // Oracle: enumerate the four paths by hand.
  // dM_1 = +-1/n, dA_1 = 0.  At node +-1/n: dA_2 = +-(1/2 - 1/n),
  // dM_2 = X_2 - X_1 - dA_2.
  const Decomposition d = doob_decompose(t);
  const PathLaw law = to_path_law(t);
  double acc = 0;
  for (Index i = 0; i < law.path_count(); ++i) {
    double qv = 0, fv = 0;
    for (int s = 1; s <= 2; ++s) {
      const double dm = d.martingale[law.nodes[i][s]];
      qv += dm * dm;
      fv += std::abs(d.drift[law.nodes[i][s - 1]]);
    }
    acc += law.probs[i] * (qv + fv * fv);
  }
  CHECK(seminorm(t, 2.0) == doctest::Approx(std::sqrt(acc)).epsilon(1e-14));
}

TEST_CASE("seminorm scales linearly on martingale trees") {
  Rng rng(23);
  RandomTreeSpec spec;
  spec.martingale = true;
  for (int rep = 0; rep < 5; ++rep) {
    const ScenarioTree t = random_tree(rng, spec);
    REQUIRE(is_martingale(t));
    const double lambda = 2.5;
    const ScenarioTree s = t.scaled(lambda);
    CHECK(seminorm(s, 2.0) ==
          doctest::Approx(lambda * seminorm(t, 2.0)).epsilon(1e-12));
    CHECK(seminorm(s, 1.0) ==
          doctest::Approx(lambda * seminorm(t, 1.0)).epsilon(1e-12));
  }
}

TEST_CASE("pair_increments: identity pair gives zeros, drift-free pairs") {
  Rng rng(31);
  RandomTreeSpec spec;
  const ScenarioTree t = random_tree(rng, spec);
  const Decomposition d = doob_decompose(t);
  const PathLaw law = to_path_law(t);
  const IncrementDelta delta =
      pair_increments(t, d, law.nodes[0], t, d, law.nodes[0]);
  CHECK(delta.martingale.cwiseAbs().maxCoeff() == 0.0);
  CHECK(delta.drift.cwiseAbs().maxCoeff() == 0.0);

  spec.martingale = true;
  const ScenarioTree m1 = random_tree(rng, spec);
  const ScenarioTree m2 = random_tree(rng, spec);
  if (m1.horizon == m2.horizon) {
    const Decomposition e1 = doob_decompose(m1);
    const Decomposition e2 = doob_decompose(m2);
    const PathLaw l1 = to_path_law(m1);
    const PathLaw l2 = to_path_law(m2);
    const IncrementDelta dd =
        pair_increments(m1, e1, l1.nodes[0], m2, e2, l2.nodes[0]);
    CHECK(dd.drift.cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("two-period small-noise pair: increment differences") {
  // P = delta_0 x ((d_1 + d_-1)/2), P_eps with first step +-eps.
  const double eps = 0.01;
  ScenarioTree P;
  P.horizon = 2;
  P.add_root(0.0);
  const int mid = P.add_child(0, 0.0, 1.0);
  P.add_child(mid, 1.0, 0.5);
  P.add_child(mid, -1.0, 0.5);

  ScenarioTree Pe;
  Pe.horizon = 2;
  Pe.add_root(0.0);
  const int up = Pe.add_child(0, eps, 0.5);
  const int dn = Pe.add_child(0, -eps, 0.5);
  // Second coordinate independent uniform on {1,-1}.
  Pe.add_child(up, 1.0, 0.5);
  Pe.add_child(up, -1.0, 0.5);
  Pe.add_child(dn, 1.0, 0.5);
  Pe.add_child(dn, -1.0, 0.5);

  const Decomposition dP = doob_decompose(P);
  const Decomposition dPe = doob_decompose(Pe);
  const PathLaw lP = to_path_law(P);
  const PathLaw lPe = to_path_law(Pe);

  // First path of Pe goes (0, eps, 1); first path of P goes (0, 0, 1).
  const IncrementDelta delta =
      pair_increments(Pe, dPe, lPe.nodes[0], P, dP, lP.nodes[0]);
  CHECK(delta.martingale[0] == doctest::Approx(eps).epsilon(1e-14));
  CHECK(delta.drift[0] == 0.0);
  // Second step: dM difference is X_2 - Y_2 = 0 here, dA difference -eps.
  CHECK(delta.martingale[1] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(delta.drift[1] == doctest::Approx(-eps).epsilon(1e-14));
}

TEST_CASE("pinned constants") {
  CHECK(ConstantsLedger::b1 == 6.0);
  CHECK(ConstantsLedger::b2 == 2.0);
  CHECK(ConstantsLedger::bdg(1.0) == 6.0);
  CHECK(ConstantsLedger::bdg(2.0) == 2.0);
  CHECK(ConstantsLedger::bdg(4.0) == 4.0);
  CHECK_THROWS(ConstantsLedger::bdg(1.5));
  CHECK(ConstantsLedger::c_p(2.0) == 1.0);
  CHECK(ConstantsLedger::avar_rate(1.0, 1.0, 0.5) == doctest::Approx(24.0));
}
