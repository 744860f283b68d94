#include "aw/verify.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "aw/generators.hpp"

namespace aw {

namespace {

Scalar expected_positive_part(const DiscreteDistribution& d) {
  Scalar s = 0;
  for (const auto& a : d.atoms) s += a.weight * std::max(a.value, 0.0);
  return s;
}

void check_claim(const Claim& claim, const TreeData& P, const TreeData& Q) {
  const Scalar realized = claim_lipschitz_realized(claim, {&P.law, &Q.law});
  if (realized > claim.lipschitz + 1e-9)
    throw std::invalid_argument(
        "claim violates its declared Lipschitz constant: realized " +
        std::to_string(realized) + " > " + std::to_string(claim.lipschitz));
}

// E_pi[[M]^p + |A|_{1-var}^{2p}] over the coupling, for the mixed moment
// in the Lipschitz-strategy contraction bound.
Scalar coupling_mixed_moment(const BiCausalCoupling& pi, const TreeData& P,
                             const TreeData& Q, Scalar p) {
  const int T = P.tree.horizon;
  Scalar acc = 0;
  for (Index i = 0; i < pi.lawP.path_count(); ++i) {
    for (Index j = 0; j < pi.lawQ.path_count(); ++j) {
      const Scalar w = pi.weights(i, j);
      if (w <= 0) continue;
      Scalar qv = 0, fv = 0;
      for (int t = 1; t <= T; ++t) {
        const Scalar dm = P.decomp.martingale[pi.lawP.nodes[i][t]] -
                          Q.decomp.martingale[pi.lawQ.nodes[j][t]];
        const Scalar da = P.decomp.drift[pi.lawP.nodes[i][t - 1]] -
                          Q.decomp.drift[pi.lawQ.nodes[j][t - 1]];
        qv += dm * dm;
        fv += std::abs(da);
      }
      acc += w * (std::pow(qv, p) + std::pow(fv, 2 * p));
    }
  }
  return acc;
}

}  // namespace

WhiResult verify_whi(const TreeData& P, const TreeData& Q, const Strategy& h,
                     const Claim& claim, Scalar m, Scalar k) {
  check_claim(claim, P, Q);
  const auto bad = h.validate(P.tree);
  if (!bad.empty()) throw std::invalid_argument("verify_whi: " + bad.front());
  if (h.bound > k + 1e-12)
    throw std::invalid_argument("verify_whi: strategy bound exceeds k");

  const AdaptedDistanceResult aw1 = adapted_wasserstein_lp(P, Q, 1.0);
  const Strategy g = project_strategy(h, aw1.coupling, Q.tree);

  const Scalar lhs =
      expected_positive_part(wealth_distribution(Q, g, &claim, m));
  const Scalar base =
      expected_positive_part(wealth_distribution(P, h, &claim, m));
  const Scalar L = claim.lipschitz;
  const Scalar rhs = base + ConstantsLedger::b1 * (k + L) * aw1.value;

  WhiResult out;
  out.projected = g;
  out.report.name = "whi";
  out.report.lhs = lhs;
  out.report.rhs = rhs;
  out.report.slack = rhs - lhs;
  out.report.constants = {{"b1", ConstantsLedger::b1},
                          {"k", k},
                          {"L", L},
                          {"aw1", aw1.value},
                          {"base_error", base}};
  return out;
}

BoundReport verify_shi(const TreeData& P, const TreeData& Q,
                       const PathStrategy& h, const Claim& claim, Scalar m,
                       Scalar k) {
  check_claim(claim, P, Q);
  if (h.bound > k + 1e-12)
    throw std::invalid_argument("verify_shi: strategy bound exceeds k");
  const Scalar ltilde = prefix_lipschitz(h, {&P.tree, &Q.tree});
  if (!std::isfinite(ltilde))
    throw std::invalid_argument(
        "verify_shi: strategy is not prefix-Lipschitz certifiable");

  const Strategy hp = realize(h, P.tree);
  const Strategy hq = realize(h, Q.tree);

  const AdaptedDistanceResult aw1 = adapted_wasserstein_lp(P, Q, 1.0);
  const AdaptedDistanceResult aw2 = adapted_wasserstein_lp(P, Q, 2.0);
  const Scalar semi_p = seminorm(P.tree, 2.0);
  const Scalar semi_q = seminorm(Q.tree, 2.0);
  const Scalar beta = ConstantsLedger::beta(ltilde, semi_p, semi_q);

  const Scalar lhs =
      expected_positive_part(wealth_distribution(Q, hq, &claim, m));
  const Scalar base =
      expected_positive_part(wealth_distribution(P, hp, &claim, m));
  const Scalar L = claim.lipschitz;
  const Scalar rhs = base + ConstantsLedger::b1 * (k + L) * aw1.value +
                     beta * aw2.value;

  BoundReport rep;
  rep.name = "shi";
  rep.lhs = lhs;
  rep.rhs = rhs;
  rep.slack = rhs - lhs;
  rep.constants = {{"b1", ConstantsLedger::b1}, {"k", k},
                   {"L", L},                    {"Ltilde", ltilde},
                   {"beta", beta},              {"aw1", aw1.value},
                   {"aw2", aw2.value},          {"base_error", base}};
  return rep;
}

BoundReport verify_avar_lipschitz(const TreeData& P, const TreeData& Q,
                                  const Claim& claim, Scalar k, Scalar alpha) {
  check_claim(claim, P, Q);
  const AvarHedgeResult hp = optimal_avar_hedge(P, claim, k, alpha);
  const AvarHedgeResult hq = optimal_avar_hedge(Q, claim, k, alpha);
  if (hp.status != LpStatus::optimal || hq.status != LpStatus::optimal)
    throw std::runtime_error("verify_avar_lipschitz: hedge LP failed");
  const AdaptedDistanceResult aw1 = adapted_wasserstein_lp(P, Q, 1.0);

  const Scalar r = ConstantsLedger::avar_rate(claim.lipschitz, k, alpha);
  BoundReport rep;
  rep.name = "avar_lipschitz";
  rep.lhs = std::abs(hp.value - hq.value);
  rep.rhs = r * aw1.value;
  rep.slack = rep.rhs - rep.lhs;
  rep.constants = {{"r", r},
                   {"alpha", alpha},
                   {"k", k},
                   {"L", claim.lipschitz},
                   {"aw1", aw1.value},
                   {"value_p", hp.value},
                   {"value_q", hq.value}};
  return rep;
}

BoundReport verify_avar_lipschitz_fixed(const TreeData& P, const TreeData& Q,
                                        const PathStrategy& h,
                                        const Claim& claim, Scalar alpha) {
  check_claim(claim, P, Q);
  const Scalar ltilde = prefix_lipschitz(h, {&P.tree, &Q.tree});
  if (!std::isfinite(ltilde))
    throw std::invalid_argument(
        "verify_avar_lipschitz_fixed: strategy not Lipschitz certifiable");
  const Strategy hp = realize(h, P.tree);
  const Strategy hq = realize(h, Q.tree);
  const Scalar k = h.bound;

  const AdaptedDistanceResult aw1 = adapted_wasserstein_lp(P, Q, 1.0);
  const AdaptedDistanceResult aw2 = adapted_wasserstein_lp(P, Q, 2.0);
  const Scalar beta =
      ConstantsLedger::beta(ltilde, seminorm(P.tree, 2.0), seminorm(Q.tree, 2.0));
  const Scalar r = ConstantsLedger::avar_rate(claim.lipschitz, k, alpha);

  const Scalar vp = avar(wealth_distribution(P, hp, &claim, 0.0), alpha);
  const Scalar vq = avar(wealth_distribution(Q, hq, &claim, 0.0), alpha);

  BoundReport rep;
  rep.name = "avar_lipschitz_fixed";
  rep.lhs = std::abs(vp - vq);
  rep.rhs = r * aw1.value + beta / alpha * aw2.value;
  rep.slack = rep.rhs - rep.lhs;
  rep.constants = {{"r", r},           {"beta", beta},
                   {"alpha", alpha},   {"k", k},
                   {"Ltilde", ltilde}, {"aw1", aw1.value},
                   {"aw2", aw2.value}};
  return rep;
}

BoundReport verify_contraction(const TreeData& P, const TreeData& Q,
                               const Strategy& h, const Claim& claim, Scalar k,
                               Scalar p) {
  if (p != 1.0 && p != 2.0)
    throw std::invalid_argument(
        "verify_contraction: weak transport is implemented for p in {1,2}");
  check_claim(claim, P, Q);
  const auto bad = h.validate(P.tree);
  if (!bad.empty())
    throw std::invalid_argument("verify_contraction: " + bad.front());
  if (h.bound > k + 1e-12)
    throw std::invalid_argument("verify_contraction: strategy bound exceeds k");

  const AdaptedDistanceResult awp = adapted_wasserstein_lp(P, Q, p);
  const Strategy g = project_strategy(h, awp.coupling, Q.tree);

  const DiscreteDistribution nu = utility_wealth_distribution(P, h, &claim);
  const DiscreteDistribution mu = utility_wealth_distribution(Q, g, &claim);
  const WeakTransportResult w = weak_ot(mu, nu, static_cast<int>(p));
  if (!w.converged)
    throw std::runtime_error("verify_contraction: weak transport not certified");

  const Scalar L = claim.lipschitz;
  const Scalar bp = ConstantsLedger::bdg(p);
  const Scalar factor =
      std::pow(2.0, (p - 1) / p) * std::pow(bp, 1.0 / p) * (k + L);

  BoundReport rep;
  rep.name = "contraction";
  rep.lhs = w.value;
  rep.rhs = factor * awp.value;
  rep.slack = rep.rhs - rep.lhs;
  rep.constants = {{"p", p},   {"b_p", bp},        {"k", k},
                   {"L", L},   {"awp", awp.value}, {"fw_gap", w.gap}};
  return rep;
}

BoundReport verify_contraction_lipschitz(const TreeData& P, const TreeData& Q,
                                         const PathStrategy& h,
                                         const Claim& claim, Scalar p) {
  if (p != 1.0 && p != 2.0)
    throw std::invalid_argument(
        "verify_contraction_lipschitz: p must be in {1,2}");
  check_claim(claim, P, Q);
  const Scalar ltilde = prefix_lipschitz(h, {&P.tree, &Q.tree});
  if (!std::isfinite(ltilde))
    throw std::invalid_argument(
        "verify_contraction_lipschitz: strategy not Lipschitz certifiable");
  const Strategy hp = realize(h, P.tree);
  const Strategy hq = realize(h, Q.tree);
  const Scalar k = h.bound;

  const AdaptedDistanceResult awp = adapted_wasserstein_lp(P, Q, p);
  const Scalar mixed = coupling_mixed_moment(awp.coupling, P, Q, p);
  const Scalar alpha_term = ConstantsLedger::alpha_lemma(
      p, ltilde, seminorm(P.tree, 2 * p), seminorm(Q.tree, 2 * p));

  const DiscreteDistribution nu = utility_wealth_distribution(P, hp, &claim);
  const DiscreteDistribution mu = utility_wealth_distribution(Q, hq, &claim);
  const TransportResult w = wasserstein(mu, nu, p);

  const Scalar L = claim.lipschitz;
  const Scalar bp = ConstantsLedger::bdg(p);
  const Scalar rhs =
      std::pow(2.0, (3 * p - 3) / p) * std::pow(bp, 1.0 / p) * (k + L) *
          awp.value +
      std::pow(alpha_term, 1.0 / p) * std::pow(mixed, 1.0 / (2 * p));

  BoundReport rep;
  rep.name = "contraction_lipschitz";
  rep.lhs = w.value;
  rep.rhs = rhs;
  rep.slack = rhs - rep.lhs;
  rep.constants = {{"p", p},
                   {"b_p", bp},
                   {"k", k},
                   {"L", L},
                   {"Ltilde", ltilde},
                   {"awp", awp.value},
                   {"alpha_lemma", alpha_term},
                   {"mixed_moment", mixed}};
  return rep;
}

BoundReport verify_oce_stability(const TreeData& P, const TreeData& Q,
                                 const Claim& claim, Scalar k,
                                 const LossSpec& loss) {
  check_claim(claim, P, Q);
  const OceHedgeResult hp = oce_hedge(P, claim, k, loss);
  const OceHedgeResult hq = oce_hedge(Q, claim, k, loss);
  const AdaptedDistanceResult aw1 = adapted_wasserstein_lp(P, Q, 1.0);

  // Local Lipschitz constant of the loss over every wealth level either
  // model can reach, conservatively widened for the certainty shift.
  const DiscreteDistribution wp =
      wealth_distribution(P, hp.strategy, &claim, 0.0);
  const DiscreteDistribution wq =
      wealth_distribution(Q, hq.strategy, &claim, 0.0);
  const Scalar radius =
      2 * std::max(std::max(std::abs(wp.min_value()), std::abs(wp.max_value())),
                   std::max(std::abs(wq.min_value()), std::abs(wq.max_value()))) +
      1;
  const Scalar slope = loss.dloss(radius);
  const Scalar rate = slope * ConstantsLedger::b1 * (k + claim.lipschitz);

  BoundReport rep;
  rep.name = "oce_stability";
  rep.lhs = std::abs(hp.value - hq.value);
  rep.rhs = rate * aw1.value;
  rep.slack = rep.rhs - rep.lhs;
  rep.constants = {{"rate", rate},
                   {"loss_slope", slope},
                   {"k", k},
                   {"L", claim.lipschitz},
                   {"aw1", aw1.value},
                   {"value_p", hp.value},
                   {"value_q", hq.value}};
  return rep;
}

namespace {

template <typename F>
void parallel_for(int n, int workers, F&& f) {
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i; (i = next.fetch_add(1)) < n;) f(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

SuiteOutcome run_verifier_suite(const std::string& kind,
                                const SuiteConfig& config) {
  SuiteOutcome out;
  out.reports.resize(static_cast<size_t>(config.instances));

  parallel_for(config.instances, config.workers, [&](int i) {
    Rng rng(config.seed + 1000003ull * static_cast<std::uint64_t>(i));
    RandomTreeSpec spec;
    spec.max_children = config.max_children;
    const int T = rng.uniform_int(config.min_horizon, config.max_horizon);
    spec.min_horizon = spec.max_horizon = T;
    spec.step_scale = 0.8;
    const TreeData P(random_tree(rng, spec));
    const TreeData Q(random_tree(rng, spec));
    const Claim claim = random_lipschitz_claim(rng, T, 1.5);
    const Scalar m = rng.uniform(-0.5, 0.5);

    BoundReport rep;
    if (kind == "whi") {
      const Strategy h = random_node_strategy(rng, P.tree, config.k);
      rep = verify_whi(P, Q, h, claim, m, config.k).report;
    } else if (kind == "shi") {
      const PathStrategy h = random_path_strategy(rng, T, config.k);
      rep = verify_shi(P, Q, h, claim, m, config.k);
    } else if (kind == "avar") {
      rep = verify_avar_lipschitz(P, Q, claim, config.k, config.alpha);
    } else if (kind == "avar_fixed") {
      const PathStrategy h = random_path_strategy(rng, T, config.k);
      rep = verify_avar_lipschitz_fixed(P, Q, h, claim, config.alpha);
    } else if (kind == "contraction") {
      const Strategy h = random_node_strategy(rng, P.tree, config.k);
      rep = verify_contraction(P, Q, h, claim, config.k, config.p);
    } else if (kind == "contraction_lipschitz") {
      const PathStrategy h = random_path_strategy(rng, T, config.k);
      rep = verify_contraction_lipschitz(P, Q, h, claim, config.p);
    } else if (kind == "oce") {
      rep = verify_oce_stability(P, Q, claim, config.k,
                                 LossSpec::exponential());
    } else {
      throw std::invalid_argument("run_verifier_suite: unknown kind " + kind);
    }
    out.reports[static_cast<size_t>(i)] = std::move(rep);
  });

  for (const auto& rep : out.reports) {
    out.worst_slack = std::min(out.worst_slack, rep.slack);
    if (!rep.ok()) ++out.failures;
  }
  return out;
}

}  // namespace aw
