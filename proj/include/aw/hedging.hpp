#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "aw/bicausal.hpp"
#include "aw/distribution.hpp"
#include "aw/tree.hpp"

namespace aw {

/// Predictable trading positions on a tree: position[u] is held over
/// (t, t+1] where u is the time-t node, bounded by |position| <= bound.
struct Strategy {
  Scalar bound = 0;
  std::vector<Scalar> position;  // indexed by node id; leaves ignored

  std::vector<std::string> validate(const ScenarioTree& tree) const;
};

/// Path-dependent payoff with a declared Lipschitz constant w.r.t. the
/// sup-norm on paths.
struct Claim {
  std::function<Scalar(const std::vector<Scalar>&)> payoff;
  Scalar lipschitz = 0;

  Vector evaluate(const PathLaw& law) const;
};

/// Largest ratio |C(w) - C(w')| / ||w - w'||_inf over all path pairs of
/// the given laws (pooled); the realized Lipschitz constant of the claim.
Scalar claim_lipschitz_realized(const Claim& claim,
                                const std::vector<const PathLaw*>& laws);

/// Strategy given as a function of the time-t value prefix, applicable
/// to any tree of matching horizon (needed whenever the same H is run
/// under two different models).
struct PathStrategy {
  Scalar bound = 0;
  // position over (t, t+1] as a function of (x_0, ..., x_t)
  std::function<Scalar(int t, const std::vector<Scalar>&)> position;
};

Strategy realize(const PathStrategy& h, const ScenarioTree& tree);

/// Exhaustive per-time Lipschitz certificate over all prefix pairs drawn
/// from the given trees (pooled): the smallest L with
/// |H_t(a) - H_t(b)| <= L max_{s<=t} |a_s - b_s| on every pair.
Scalar prefix_lipschitz(const PathStrategy& h,
                        const std::vector<const ScenarioTree*>& trees);

/// Discrete stochastic integral (H . X)_T along each path.
Vector gains(const TreeData& data, const Strategy& h);

/// Law of C - m - (H.X)_T over the leaves (claim optional: C = 0).
DiscreteDistribution wealth_distribution(const TreeData& data,
                                         const Strategy& h,
                                         const Claim* claim, Scalar m);

/// Law of C + (H.X)_T (utility-side sign convention).
DiscreteDistribution utility_wealth_distribution(const TreeData& data,
                                                 const Strategy& h,
                                                 const Claim* claim,
                                                 Scalar shift = 0);

/// Average value at risk at level alpha in (0, 1]:
///   AVaR_alpha(Z) = inf_m m + E[(Z - m)^+] / alpha,
/// evaluated exactly on sorted atoms.  Translation-equivariant exactly.
Scalar avar(const DiscreteDistribution& dist, Scalar alpha);

struct AvarHedgeResult {
  Scalar value = 0;
  Strategy strategy;
  Scalar m_star = 0;
  LpStatus status = LpStatus::optimal;
};

/// Exact linear program for inf_{|H|<=k} AVaR_alpha(C - (H.X)_T),
/// jointly over (m, H, per-path slacks).
AvarHedgeResult optimal_avar_hedge(const TreeData& data, const Claim& claim,
                                   Scalar k, Scalar alpha);

/// Convex strictly increasing loss with left derivative and growth data.
struct LossSpec {
  std::function<Scalar(Scalar)> loss;
  std::function<Scalar(Scalar)> dloss;
  Scalar growth_c = 1;
  Scalar growth_p = 1;

  std::vector<std::string> validate(Scalar lo, Scalar hi,
                                    int grid = 64) const;

  static LossSpec positive_part_scaled(Scalar alpha);  // x^+ / alpha
  static LossSpec exponential();                       // e^x
};

struct LossHedgeResult {
  Scalar value = 0;
  Strategy strategy;
  long iterations = 0;
};

/// inf_{|H|<=k} E[loss(C - m - (H.X)_T)].  The positive-part loss is
/// solved as an exact LP; general convex losses by projected gradient
/// descent with backtracking to tolerance 1e-6.
LossHedgeResult expected_loss_hedge(const TreeData& data, const Claim& claim,
                                    Scalar k, Scalar m);
LossHedgeResult expected_loss_hedge(const TreeData& data, const Claim& claim,
                                    Scalar k, Scalar m, const LossSpec& loss);

/// Concave increasing utility with left derivative and growth data
/// U'(x) <= c (1 + |x|^{p-1}).
struct UtilitySpec {
  std::function<Scalar(Scalar)> u;
  std::function<Scalar(Scalar)> du;
  Scalar growth_c = 1;
  Scalar growth_p = 1;

  std::vector<std::string> validate(Scalar lo, Scalar hi,
                                    int grid = 64) const;

  static UtilitySpec capped_linear(Scalar cap);          // min(x, cap)
  static UtilitySpec capped_exponential(Scalar gamma);   // 1 - e^{-gamma x}
};

struct UtilityMaxResult {
  Scalar value = 0;
  Strategy strategy;
  Scalar projected_gradient_norm = 0;
  Scalar optimality_gap = 0;  // linear certificate from concavity
  long iterations = 0;
  bool converged = true;
};

/// sup_{|H|<=k} E[U(C + (H.X)_T)] by projected gradient ascent with
/// backtracking; stops when the unit-step projected gradient norm drops
/// below 1e-8.  The certificate bounds sup - value from above.
UtilityMaxResult utility_maximize(const TreeData& data, const Claim& claim,
                                  Scalar k, const UtilitySpec& util);

/// Objective E[U(C + (H.X)_T)] and its gradient in the node positions
/// (zero on leaves); exposed for derivative checks.
Scalar utility_objective(const TreeData& data, const Claim& claim,
                         const UtilitySpec& util, const Strategy& h);
std::vector<Scalar> utility_objective_gradient(const TreeData& data,
                                               const Claim& claim,
                                               const UtilitySpec& util,
                                               const Strategy& h);

struct IndifferenceResult {
  Scalar price = 0;
  Scalar residual = 0;  // value of the defining equation at the price
  long bisection_steps = 0;
};

/// Bid price v solving sup_H E[U(C - v + (H.X)_T)] = sup_H E[U((H.X)_T)]
/// by bisection; the bracket [min C - 1, max C + 1] is expanded
/// geometrically if needed and failure to bracket raises.
IndifferenceResult indifference_price(const TreeData& data, const Claim& claim,
                                      Scalar k, const UtilitySpec& util,
                                      Scalar tol);

/// Conditional-expectation projection of a strategy through a bi-causal
/// coupling: G(v) = E_pi[H(X-node at t) | Y passes v].  The bound
/// carries over since G is a convex combination of H values.
Strategy project_strategy(const Strategy& h, const BiCausalCoupling& pi,
                          const ScenarioTree& treeQ);

/// E_pi[(H(X) . Y)_T | Y = path j] for the conditional-integral identity.
Vector mixed_integral_conditional(const Strategy& h,
                                  const BiCausalCoupling& pi);

/// Optimized certainty equivalent rho(Z) = inf_m E[loss(Z - m)] + m by
/// golden-section search over a bracket spanning the atom range.
Scalar oce_risk(const DiscreteDistribution& dist, const LossSpec& loss);

struct OceHedgeResult {
  Scalar value = 0;
  Strategy strategy;
  Scalar m_star = 0;
  long iterations = 0;
};

/// inf_{|H|<=k} rho(C - (H.X)_T) jointly over (m, H) by projected
/// gradient descent (smooth losses).
OceHedgeResult oce_hedge(const TreeData& data, const Claim& claim, Scalar k,
                         const LossSpec& loss);

}  // namespace aw
