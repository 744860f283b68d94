#pragma once

#include <functional>
#include <string>
#include <vector>

#include "aw/doob.hpp"
#include "aw/transport.hpp"
#include "aw/tree.hpp"

namespace aw {

/// Tree together with its path enumeration and Doob decomposition;
/// bundled because every distance computation needs all three.
struct TreeData {
  ScenarioTree tree;
  PathLaw law;
  Decomposition decomp;

  explicit TreeData(ScenarioTree t)
      : tree(std::move(t)), law(to_path_law(tree)), decomp(doob_decompose(tree)) {}
};

/// Joint weights over leaf-path pairs of two trees, constrained to be
/// causal in both directions: conditionally on either path's time-t
/// prefix, the other path's time-t prefix carries no information about
/// the future.
struct BiCausalCoupling {
  PathLaw lawP;
  PathLaw lawQ;
  Matrix weights;  // lawP.path_count() x lawQ.path_count()

  Scalar marginal_residual() const;

  /// Largest violation of the prefix-exchange equalities
  ///   P(w') pi(w, F_v) = P(w) pi(w', F_v)
  /// over all times t < T, all same-prefix path pairs (w, w') on either
  /// side and all opposite-side time-t nodes v.
  Scalar causality_residual() const;

  Scalar max_invariant_residual() const;

  /// Expected cost sum_ij pi_ij c(i,j).
  Scalar expected_cost(const Matrix& cost) const;
};

/// Pairwise cost c_p(w, e) = [sum_t (dM^X_t - dM^Y_t)^2]^{p/2}
///                         + [sum_t |dA^X_t - dA^Y_t|]^p
/// under the realized quadratic variation convention.
Matrix pair_cost(const TreeData& P, const TreeData& Q, Scalar p);

struct AdaptedDistanceResult {
  Scalar value = 0;            // AW_p = (expected cost)^{1/p}
  Scalar expected_cost = 0;    // E_pi[c_p] at the optimizer
  BiCausalCoupling coupling;   // an optimizer (ties broken by pivot rule)
  LpStatus status = LpStatus::optimal;
  long lp_iterations = 0;
  Index lp_variables = 0;
  Index lp_rows = 0;
};

/// Exact adapted Wasserstein distance via the bi-causal linear program.
/// Rejects instances whose leaf-pair count exceeds `budget` variables
/// with std::length_error rather than approximating silently.
AdaptedDistanceResult adapted_wasserstein_lp(const TreeData& P,
                                             const TreeData& Q, Scalar p,
                                             Index budget = 50000);
AdaptedDistanceResult adapted_wasserstein_lp(const ScenarioTree& P,
                                             const ScenarioTree& Q, Scalar p,
                                             Index budget = 50000);

/// Stage cost attached to a pair of edges (parent -> child in each tree).
using StageCost = std::function<Scalar(const ScenarioTree& P, int childP,
                                       const ScenarioTree& Q, int childQ)>;

/// Backward recursion for stage-additive costs:
///   V(u, v) = min over couplings of the child transition laws of
///             sum lambda(c,c') [stage(c,c') + V(c,c')],
/// with V = 0 on leaf pairs.  Returns the expected total cost at the
/// root pair.  Valid for any explicitly stage-additive cost.
Scalar nested_value_dp(const ScenarioTree& P, const ScenarioTree& Q,
                       const StageCost& stage);

/// AW_2 via backward recursion.  Only correct when the adapted cost is
/// stage-additive, i.e. for p = 2 and martingale marginals (the drift
/// term vanishes and [M^X - M^Y]_T = sum_t (dX_t - dY_t)^2); any other
/// request is rejected with an explanatory error.
Scalar adapted_wasserstein_dp_aw2(const ScenarioTree& P,
                                  const ScenarioTree& Q);

/// Stepwise comonotone (quantile) coupling of the child transition laws,
/// composed forward through both trees; bi-causal by construction and an
/// upper bound for the adapted distance.
BiCausalCoupling synchronous_coupling(const TreeData& P, const TreeData& Q);

/// Cost of a given bi-causal coupling, value = E[c_p]^{1/p}.
Scalar coupling_value(const BiCausalCoupling& pi, const TreeData& P,
                      const TreeData& Q, Scalar p);

struct MetricAxiomReport {
  Scalar worst_symmetry_gap = 0;
  Scalar worst_triangle_slack = kInfinity;  // min of AW(P,Q)+AW(Q,R)-AW(P,R)
  bool identity_consistent = true;
  std::vector<std::string> violations;
  bool passed(Scalar tol = 1e-7) const;
};

/// Symmetry, identity of indiscernibles (against canonical path-law
/// equality) and triangle inequality over all triples of the given trees.
MetricAxiomReport check_metric_axioms(const std::vector<ScenarioTree>& trees,
                                      Scalar p, Scalar tol = 1e-7);

}  // namespace aw
