#include <doctest.h>

#include <cmath>

#include "aw/generators.hpp"
#include "aw/models.hpp"
#include "aw/report_io.hpp"
#include "aw/verify.hpp"

using namespace aw;

namespace {

std::pair<TreeData, TreeData> random_pair(Rng& rng, int max_children = 3) {
  RandomTreeSpec spec;
  spec.max_children = max_children;
  const int T = rng.uniform_int(2, 3);
  spec.min_horizon = spec.max_horizon = T;
  spec.step_scale = 0.8;
  TreeData P(random_tree(rng, spec));
  TreeData Q(random_tree(rng, spec));
  return {std::move(P), std::move(Q)};
}

}  // namespace

TEST_CASE("whi: identical models give slack equal to the distance term") {
  Rng rng(81);
  auto [P, Q] = random_pair(rng);
  const Claim claim = random_lipschitz_claim(rng, P.tree.horizon, 1.0);
  const Strategy h = random_node_strategy(rng, P.tree, 1.0);
  const WhiResult r = verify_whi(P, P, h, claim, 0.2, 1.0);
  // AW(P,P) = 0 and the projection through the diagonal returns H, so
  // lhs = base error exactly.
  CHECK(r.report.constants.at("aw1") < 1e-9);
  CHECK(r.report.lhs == doctest::Approx(r.report.rhs).epsilon(1e-8));
  CHECK(r.report.ok());
}

TEST_CASE("whi holds on random instances") {
  Rng rng(82);
  for (int rep = 0; rep < 15; ++rep) {
    auto [P, Q] = random_pair(rng);
    const Claim claim = random_lipschitz_claim(rng, P.tree.horizon, 1.5);
    const Strategy h = random_node_strategy(rng, P.tree, 0.8);
    const Scalar m = rng.uniform(-0.5, 0.5);
    const WhiResult r = verify_whi(P, Q, h, claim, m, 0.8);
    CHECK(r.report.ok());
    CHECK(r.projected.validate(Q.tree).empty());
  }
}

TEST_CASE("shi holds with the same Lipschitz strategy on both models") {
  Rng rng(83);
  for (int rep = 0; rep < 10; ++rep) {
    auto [P, Q] = random_pair(rng);
    const Claim claim = random_lipschitz_claim(rng, P.tree.horizon, 1.0);
    const PathStrategy h = random_path_strategy(rng, P.tree.horizon, 0.7);
    const BoundReport r = verify_shi(P, Q, h, claim, 0.1, 0.7);
    CHECK(r.ok());
    CHECK(r.constants.at("Ltilde") < kInfinity);
  }
}

TEST_CASE("avar stability of the optimal hedges") {
  Rng rng(84);
  for (int rep = 0; rep < 10; ++rep) {
    auto [P, Q] = random_pair(rng);
    const Claim claim = random_lipschitz_claim(rng, P.tree.horizon, 1.0);
    const Scalar alpha = 0.2 + 0.6 * rng.uniform();
    const BoundReport r = verify_avar_lipschitz(P, Q, claim, 0.9, alpha);
    CHECK(r.ok());
  }

  // Identical models: both infima coincide.
  auto [P, Q] = random_pair(rng);
  const Claim claim = random_lipschitz_claim(rng, P.tree.horizon, 1.0);
  const BoundReport same = verify_avar_lipschitz(P, P, claim, 0.5, 0.4);
  CHECK(same.lhs < 1e-8);
  CHECK(same.ok());
}

TEST_CASE("avar stability with a fixed Lipschitz strategy") {
  Rng rng(85);
  for (int rep = 0; rep < 10; ++rep) {
    auto [P, Q] = random_pair(rng);
    const Claim claim = random_lipschitz_claim(rng, P.tree.horizon, 1.0);
    const PathStrategy h = random_path_strategy(rng, P.tree.horizon, 0.6);
    const Scalar alpha = 0.25 + 0.5 * rng.uniform();
    const BoundReport r = verify_avar_lipschitz_fixed(P, Q, h, claim, alpha);
    CHECK(r.ok());
  }
}

TEST_CASE("contraction bound at the adapted-optimal coupling") {
  Rng rng(86);
  for (int rep = 0; rep < 8; ++rep) {
    auto [P, Q] = random_pair(rng);
    const Claim claim = random_lipschitz_claim(rng, P.tree.horizon, 1.2);
    const Strategy h = random_node_strategy(rng, P.tree, 0.8);
    for (double p : {1.0, 2.0}) {
      const BoundReport r = verify_contraction(P, Q, h, claim, 0.8, p);
      CHECK(r.ok());
    }
  }

  // Identity pair: both sides vanish.
  auto [P, Q] = random_pair(rng);
  const Claim claim = random_lipschitz_claim(rng, P.tree.horizon, 1.0);
  const Strategy h = random_node_strategy(rng, P.tree, 0.5);
  const BoundReport r = verify_contraction(P, P, h, claim, 0.5, 1.0);
  CHECK(r.lhs < 1e-7);
  CHECK(r.rhs < 1e-7);
}

TEST_CASE("lipschitz contraction for the plain distance") {
  Rng rng(87);
  for (int rep = 0; rep < 8; ++rep) {
    auto [P, Q] = random_pair(rng);
    const Claim claim = random_lipschitz_claim(rng, P.tree.horizon, 1.0);
    const PathStrategy h = random_path_strategy(rng, P.tree.horizon, 0.5);
    for (double p : {1.0, 2.0}) {
      const BoundReport r = verify_contraction_lipschitz(P, Q, h, claim, p);
      CHECK(r.ok());
    }
  }
}

TEST_CASE("sign strategy on the small-noise pair: plain distance stalls, "
          "weak distance vanishes") {
  // The projected strategy is zero, so the Q-side law collapses to a
  // point; the hedged P_eps-law keeps mass 1/2 at height ~1.  The plain
  // distance therefore stays near 1 while the weak (barycentric) cost
  // only sees the mean eps.
  for (double eps : {0.2, 0.05, 0.01}) {
    const auto [Pe, P] = contraction_cex_pair(eps);
    const TreeData dPe(Pe), dP(P);
    Strategy sign;
    sign.bound = 1.0;
    sign.position.assign(Pe.nodes.size(), 0.0);
    for (size_t u = 0; u < Pe.nodes.size(); ++u)
      if (!Pe.nodes[u].children.empty() && Pe.nodes[u].time == 1)
        sign.position[u] = Pe.nodes[u].value > 0 ? 1.0 : -1.0;

    const Claim zero{[](const std::vector<Scalar>&) { return 0.0; }, 0.0};
    const AdaptedDistanceResult aw = adapted_wasserstein_lp(dPe, dP, 1.0);
    const Strategy g = project_strategy(sign, aw.coupling, P);
    const DiscreteDistribution nu = utility_wealth_distribution(dPe, sign, &zero);
    const DiscreteDistribution mu = utility_wealth_distribution(dP, g, &zero);

    const double plain = wasserstein(mu, nu, 1.0).value;
    const double weak = weak_ot(mu, nu, 1).value;
    CHECK(plain > 0.9);               // no convergence in d_1
    CHECK(weak <= eps + 1e-9);        // contraction in d_1^w
    CHECK(weak <= 2.0 * aw.value + 1e-9);
  }
}

TEST_CASE("oce stability report") {
  Rng rng(88);
  for (int rep = 0; rep < 5; ++rep) {
    auto [P, Q] = random_pair(rng);
    const Claim claim = random_lipschitz_claim(rng, P.tree.horizon, 0.8);
    const BoundReport r =
        verify_oce_stability(P, Q, claim, 0.7, LossSpec::exponential());
    CHECK(r.ok());
  }
}

TEST_CASE("report serialization embeds the constants ledger") {
  Rng rng(89);
  auto [P, Q] = random_pair(rng);
  const Claim claim = random_lipschitz_claim(rng, P.tree.horizon, 1.0);
  const BoundReport r = verify_avar_lipschitz(P, Q, claim, 0.5, 0.5);
  const std::string json = report_to_json(r);
  CHECK(json.find("\"b1\": 6.0") != std::string::npos);
  CHECK(json.find("\"slack\"") != std::string::npos);
  CHECK(json.find("realized") != std::string::npos);
}
