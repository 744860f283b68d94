#include <doctest.h>

#include <cmath>

#include "aw/bicausal.hpp"
#include "aw/generators.hpp"
#include "aw/lattice.hpp"
#include "aw/models.hpp"

using namespace aw;

TEST_CASE("random walk: degenerate and martingale properties") {
  const ScenarioTree flat = random_walk_tree(3, constant_schedule(0.0));
  CHECK(same_path_law(flat, constant_tree(3, 0.0)));

  const ScenarioTree walk = random_walk_tree(4, constant_schedule(0.7));
  CHECK(validate(walk).empty());
  CHECK(is_martingale(walk, 1e-12));
  CHECK_THROWS(random_walk_tree(0, constant_schedule(1.0)));
}

TEST_CASE("binomial and gauss-hermite increment moments") {
  const int N = 3;
  const double sigma = 1.3;
  for (const Quantization& q :
       {Quantization::Binomial(), Quantization::GaussHermite(3),
        Quantization::GaussHermite(5)}) {
    const ScenarioTree t = random_walk_tree(N, constant_schedule(sigma), q);
    const Decomposition d = doob_decompose(t);
    for (size_t u = 0; u < t.nodes.size(); ++u) {
      if (t.nodes[u].children.empty()) continue;
      CHECK(std::abs(d.drift[u]) < 1e-12);  // exact mean zero
      double var = 0;
      for (int c : t.nodes[u].children)
        var += t.nodes[c].prob * d.martingale[c] * d.martingale[c];
      CHECK(var == doctest::Approx(sigma * sigma / N).epsilon(1e-12));
    }
  }
  CHECK_THROWS(random_walk_tree(2, constant_schedule(1.0),
                                Quantization::GaussHermite(1)));
}

TEST_CASE("gauss-hermite nodes integrate low moments exactly") {
  const auto [nodes, weights] = gauss_hermite_standard_normal(4);
  double m1 = 0, m2 = 0, m4 = 0, mass = 0;
  for (Index i = 0; i < nodes.size(); ++i) {
    mass += weights[i];
    m1 += weights[i] * nodes[i];
    m2 += weights[i] * nodes[i] * nodes[i];
    m4 += weights[i] * std::pow(nodes[i], 4);
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(m1) < 1e-14);
  CHECK(m2 == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(m4 == doctest::Approx(3.0).epsilon(1e-12));  // exact at 4 points
}

TEST_CASE("scaling identity for binomial walks at every small N") {
  Rng rng(91);
  for (int N = 1; N <= 5; ++N) {
    std::vector<double> s1(N), s2(N);
    for (int n = 0; n < N; ++n) {
      s1[n] = 0.2 + rng.uniform();
      s2[n] = 0.2 + rng.uniform();
    }
    const auto f1 = step_schedule(s1, 1.0 / N);
    const auto f2 = step_schedule(s2, 1.0 / N);
    const ScenarioTree A = random_walk_tree(N, f1);
    const ScenarioTree B = random_walk_tree(N, f2);
    const double lp = adapted_wasserstein_lp(A, B, 2.0).value;
    CHECK(lp == doctest::Approx(walk_scaling_identity(N, f1, f2))
                    .epsilon(1e-9));
  }
}

TEST_CASE("gbm tree: martingale with unit terminal mean") {
  const ScenarioTree one = gbm_tree(3, 0.0, 1.0);
  CHECK(same_path_law(one, constant_tree(3, 1.0)));

  for (int N : {1, 4, 7}) {
    const ScenarioTree t = gbm_tree(N, 0.35, 1.0);
    CHECK(validate(t).empty());
    CHECK(is_martingale(t, 1e-12));
    const PathLaw law = to_path_law(t);
    double mean = 0;
    for (Index i = 0; i < law.path_count(); ++i)
      mean += law.probs[i] * law.values(i, N);
    CHECK(mean == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS(gbm_tree(2, -0.1, 1.0));
}

TEST_CASE("drift-diffusion trees") {
  const ScenarioTree still = drift_diffusion_tree(
      3, constant_schedule(0.0), [](Scalar, Scalar) { return 0.0; });
  CHECK(same_path_law(still, constant_tree(3, 0.0)));

  // Pure drift: one deterministic path, seminorm = sum |mu| dt.
  const auto mu = step_schedule({0.3, -0.2, 0.5, 0.1}, 0.25);
  const ScenarioTree drift =
      drift_diffusion_tree(4, mu, [](Scalar, Scalar) { return 0.0; });
  const PathLaw law = to_path_law(drift);
  REQUIRE(law.path_count() == 1);
  const double expected = (0.3 + 0.2 + 0.5 + 0.1) * 0.25;
  CHECK(seminorm(drift, 1.0) == doctest::Approx(expected).epsilon(1e-12));

  // Euler drift increments are exactly mu dt.
  const ScenarioTree both =
      drift_diffusion_tree(3, mu, [](Scalar, Scalar x) { return 0.4 + 0.1 * std::abs(x); });
  const Decomposition d = doob_decompose(both);
  for (size_t u = 0; u < both.nodes.size(); ++u)
    if (!both.nodes[u].children.empty()) {
      const double t = both.nodes[u].time / 3.0;
      CHECK(d.drift[u] == doctest::Approx(mu(t) / 3.0).epsilon(1e-12));
    }
}

TEST_CASE("two-drift pair: adapted distance matches the drift integral") {
  // Same (time-only) volatility, different time-only drifts: the
  // martingale parts can be matched exactly, so AW_1 equals the Riemann
  // sum of |mu1 - mu2| dt, which converges to the integral.
  const auto mu1 = [](Scalar t) { return 0.8 * t; };
  const auto mu2 = [](Scalar t) { return -0.4 + 0.3 * t; };
  const auto sig = [](Scalar, Scalar) { return 0.5; };
  for (int N : {2, 4}) {
    const ScenarioTree A = drift_diffusion_tree(N, mu1, sig);
    const ScenarioTree B = drift_diffusion_tree(N, mu2, sig);
    double riemann = 0;
    for (int n = 0; n < N; ++n)
      riemann += std::abs(mu1(static_cast<Scalar>(n) / N) -
                          mu2(static_cast<Scalar>(n) / N)) /
                 N;
    const double lp = adapted_wasserstein_lp(A, B, 1.0).value;
    CHECK(lp == doctest::Approx(riemann).epsilon(1e-9));
    // Quadrature of the continuous-time closed form, left rule error.
    double integral = 0;
    const int fine = 20000;
    for (int i = 0; i < fine; ++i) {
      const double t = (i + 0.5) / fine;
      integral += std::abs(mu1(t) - mu2(t)) / fine;
    }
    CHECK(std::abs(lp - integral) < 1.0 / N);
  }
}

TEST_CASE("call claim basics") {
  const Claim c0 = call_claim(0.0);
  const ScenarioTree t = gbm_tree(3, 0.25, 1.0);
  const TreeData data(t);
  const Vector pay = c0.evaluate(data.law);
  for (Index i = 0; i < pay.size(); ++i)
    CHECK(pay[i] == data.law.values(i, 3));  // positive tree: payoff = x_T

  const Claim far = call_claim(1e6);
  CHECK(far.evaluate(data.law).maxCoeff() == 0.0);

  CHECK(claim_lipschitz_realized(c0, {&data.law}) <= 1.0 + 1e-12);
}

TEST_CASE("counterexample suite is well formed") {
  for (const auto& [name, tree] : counterexample_suite(10, 0.1)) {
    INFO(name);
    CHECK(validate(tree).empty());
  }

  // Figure-1 pair: tiny plain distance, order-one adapted distance.
  const auto [P, Q] = figure1_pair(0.02);
  const TreeData dP(P), dQ(Q);
  const double w1 = wasserstein(dP.law, dQ.law, 1.0).value;
  const double aw1 = adapted_wasserstein_lp(dP, dQ, 1.0).value;
  CHECK(w1 <= 0.02 + 1e-12);
  CHECK(aw1 > 0.5);
}

TEST_CASE("unbounded strategies blow up on the vanishing two-point model") {
  const double eps = 0.01, alpha = 0.3;
  const auto [Pe, null_tree] = remark53_pair(eps);
  const TreeData data(Pe);

  // Bounded sets give finite values...
  const Claim zero{[](const std::vector<Scalar>&) { return 0.0; }, 0.0};
  const AvarHedgeResult bounded = optimal_avar_hedge(data, zero, 1.0, alpha);
  REQUIRE(bounded.status == LpStatus::optimal);
  CHECK(std::isfinite(bounded.value));

  // ...while short positions of growing size drive AVaR below any level.
  double prev = 0;
  for (double k : {1e2, 1e4, 1e6}) {
    Strategy shortpos;
    shortpos.bound = k;
    shortpos.position.assign(Pe.nodes.size(), -k);
    const double v =
        avar(wealth_distribution(data, shortpos, nullptr, 0.0), alpha);
    CHECK(v < prev);
    prev = v;
  }
  CHECK(prev < -1e3);
}

TEST_CASE("lattices agree with explicit trees at small N") {
  const int N = 6;
  const double sigma = 0.3, T = 1.0;

  // GBM: path law of the tree vs forward weights of the lattice.
  const BinomialLattice lat = gbm_lattice(N, sigma, T);
  const ScenarioTree tree = gbm_tree(N, sigma, T);
  const Vector w = lat.terminal_weights();
  CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-12));
  const DiscreteDistribution lattice_terminal = [&] {
    DiscreteDistribution d;
    for (int k = 0; k <= N; ++k) d.atoms.push_back({lat.value(N, k), w[k]});
    return d.canonical();
  }();
  CHECK(approx_equal(to_path_law(tree).terminal_law(), lattice_terminal,
                     1e-10, 1e-10));

  // Call value against direct path enumeration.
  const TreeData data(tree);
  const Claim call = call_claim(1.0);
  const Vector pay = call.evaluate(data.law);
  double direct = 0;
  for (Index i = 0; i < pay.size(); ++i) direct += data.law.probs[i] * pay[i];
  CHECK(lattice_call_value(lat, 1.0) == doctest::Approx(direct).epsilon(1e-12));
  CHECK(lattice_max_call_delta(lat, 1.0) <= 1.0 + 1e-12);
}

TEST_CASE("lattice synchronous cost equals the tree synchronous cost") {
  const int N = 5;
  const double t_horizon = 1.0;
  const BinomialLattice la = gbm_lattice(N, 0.2, t_horizon);
  const BinomialLattice lb = gbm_lattice(N, 0.3, t_horizon);
  const TreeData ta(gbm_tree(N, 0.2, t_horizon));
  const TreeData tb(gbm_tree(N, 0.3, t_horizon));
  const BiCausalCoupling sync = synchronous_coupling(ta, tb);
  const double tree_cost = std::pow(coupling_value(sync, ta, tb, 2.0), 2.0);
  CHECK(lattice_sync_cost2(la, lb) ==
        doctest::Approx(tree_cost).epsilon(1e-10));

  // Arithmetic pair: deterministic mismatch (s1 - s2)^2.
  const BinomialLattice wa = arithmetic_walk_lattice(4, 0.2);
  const BinomialLattice wb = arithmetic_walk_lattice(4, 0.3);
  CHECK(lattice_sync_cost2(wa, wb) == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("complete-market identity: optimal AVaR hedge value is E[C]") {
  // On a binomial martingale model the call is replicable with |delta|
  // <= 1, so for k >= 1 the hedged AVaR collapses to the expectation,
  // for every level alpha.  This is what licenses the lattice shortcut
  // at N = 100.
  for (int N : {2, 4, 6}) {
    const ScenarioTree tree = random_walk_tree(N, constant_schedule(0.2));
    const TreeData data(tree);
    const Claim call = call_claim(0.0);
    const Vector pay = call.evaluate(data.law);
    double mean = 0;
    for (Index i = 0; i < pay.size(); ++i) mean += data.law.probs[i] * pay[i];
    for (double alpha : {0.3, 0.7}) {
      const AvarHedgeResult r = optimal_avar_hedge(data, call, 1.0, alpha);
      REQUIRE(r.status == LpStatus::optimal);
      CHECK(r.value == doctest::Approx(mean).epsilon(1e-9));
    }
    const BinomialLattice lat = arithmetic_walk_lattice(N, 0.2);
    CHECK(lattice_call_value(lat, 0.0) == doctest::Approx(mean).epsilon(1e-12));
  }
}
