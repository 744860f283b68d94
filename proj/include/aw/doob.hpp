#pragma once

#include <string>
#include <vector>

#include "aw/tree.hpp"
#include "aw/types.hpp"

namespace aw {

/// Unique decomposition X = M + A of the canonical process on a tree.
/// drift[u]     = E[X_{t+1} - X_t | node u]          (non-terminal u)
/// martingale[c] = (x_c - x_parent) - drift[parent]  (non-root c)
/// so that martingale increments have zero conditional mean node by node
/// and drift increments are predictable.
struct Decomposition {
  std::vector<Scalar> drift;
  std::vector<Scalar> martingale;

  /// Realized quadratic variation sum_t (dM_t)^2 along a root-to-leaf
  /// node sequence, and first variation sum_t |dA_t|.
  Scalar path_quadratic_variation(const std::vector<int>& path_nodes) const;
  Scalar path_first_variation(const std::vector<int>& path_nodes) const;

  std::string to_csv(const ScenarioTree& tree) const;
};

Decomposition doob_decompose(const ScenarioTree& tree);

/// Largest violation of the node-wise martingale property
/// |sum_c p_c dM(u,c)|; zero up to rounding for a correct decomposition.
Scalar martingale_residual(const ScenarioTree& tree, const Decomposition& d);

bool is_martingale(const ScenarioTree& tree, Scalar tol = kMartingaleTol);

/// Distance to the null model: AW_p(P, delta_{x0}) computed directly as
/// E_P[[M]_T^{p/2} + |A|_{1-var}^p]^{1/p} under the realized quadratic
/// variation convention.  Zero exactly for constant trees.  Rejects p < 1.
Scalar seminorm(const ScenarioTree& tree, Scalar p);

/// Per-step differences of martingale and drift increments of two paths,
/// each decomposed under its own marginal law (the decompositions stay
/// valid under any bi-causal coupling).  Both vectors have length T.
struct IncrementDelta {
  Vector martingale;
  Vector drift;
};
IncrementDelta pair_increments(const ScenarioTree& treeP,
                               const Decomposition& dp,
                               const std::vector<int>& pathP,
                               const ScenarioTree& treeQ,
                               const Decomposition& dq,
                               const std::vector<int>& pathQ);

/// Fixed and derived constants used by the bound verifiers.  b1 and b2
/// are pinned; everything else is recomputed from its inputs on demand
/// and never cached across instances.
struct ConstantsLedger {
  static constexpr Scalar b1 = 6.0;
  static constexpr Scalar b2 = 2.0;

  /// Upper constant in E[max_t |M_t|^p] <= b_p E[[M]_T^{p/2}]:
  /// 6 for p = 1, p for p >= 2; values in (1,2) are not pinned and
  /// are rejected.
  static Scalar bdg(Scalar p);

  /// Constant controlling quadratic variation by the terminal value;
  /// only the p = 2 instance (equal to 1) is used here.
  static Scalar c_p(Scalar p);

  static Scalar beta(Scalar lipschitz_h, Scalar aw2_p_null, Scalar aw2_q_null);
  static Scalar avar_rate(Scalar lipschitz_claim, Scalar k, Scalar alpha);
  static Scalar alpha_lemma(Scalar p, Scalar lipschitz_h, Scalar semi2p_p,
                            Scalar semi2p_q);
};

}  // namespace aw
