#pragma once

#include <map>
#include <string>

#include "aw/hedging.hpp"

namespace aw {

/// Two sides of a proved inequality evaluated on one instance, plus the
/// quantities that went into the right-hand side.  slack = rhs - lhs;
/// a correct implementation never sees slack below -1e-7.
struct BoundReport {
  std::string name;
  Scalar lhs = 0;
  Scalar rhs = 0;
  Scalar slack = 0;
  std::map<std::string, Scalar> constants;
  bool ok(Scalar tol = 1e-7) const { return slack >= -tol; }
};

/// Almost-superhedge transfer: project H through an adapted-distance
/// optimal coupling to G and check
///   E_Q[(C-m-(G.Y))^+] <= E_P[(C-m-(H.X))^+] + b1 (k+L) AW_1(P,Q).
/// Returns the report together with the projected strategy.
struct WhiResult {
  BoundReport report;
  Strategy projected;
};
WhiResult verify_whi(const TreeData& P, const TreeData& Q, const Strategy& h,
                     const Claim& claim, Scalar m, Scalar k);

/// Same-strategy variant for prefix-Lipschitz H:
///   E_Q[...] <= E_P[...] + b1 (k+L) AW_1 + beta AW_2,
/// beta = 2 sqrt(2) b1 Ltilde min(AW_2(P, null), AW_2(Q, null)).
BoundReport verify_shi(const TreeData& P, const TreeData& Q,
                       const PathStrategy& h, const Claim& claim, Scalar m,
                       Scalar k);

/// | inf_H AVaR^P - inf_H AVaR^Q | <= b1 (L+k) / alpha * AW_1(P, Q).
BoundReport verify_avar_lipschitz(const TreeData& P, const TreeData& Q,
                                  const Claim& claim, Scalar k, Scalar alpha);

/// Fixed-strategy AVaR variant with the beta/alpha AW_2 term.
BoundReport verify_avar_lipschitz_fixed(const TreeData& P, const TreeData& Q,
                                        const PathStrategy& h,
                                        const Claim& claim, Scalar alpha);

/// Weak-transport contraction at the adapted-optimal coupling:
///   d_p^w(law_Q(C + G.Y), law_P(C + H.X))
///     <= 2^{(p-1)/p} b_p^{1/p} (k+L) AW_p(P, Q).
BoundReport verify_contraction(const TreeData& P, const TreeData& Q,
                               const Strategy& h, const Claim& claim, Scalar k,
                               Scalar p);

/// Lipschitz-strategy contraction for the plain Wasserstein distance,
/// with the extra alpha-term from the mixed moment of the coupling.
BoundReport verify_contraction_lipschitz(const TreeData& P, const TreeData& Q,
                                         const PathStrategy& h,
                                         const Claim& claim, Scalar p);

/// Optimized-certainty-equivalent stability mirroring the AVaR check,
/// with the loss slope over the realized wealth range as the rate.
BoundReport verify_oce_stability(const TreeData& P, const TreeData& Q,
                                 const Claim& claim, Scalar k,
                                 const LossSpec& loss);

/// Randomized verifier sweeps: each instance draws a pair of small trees
/// of equal horizon, a Lipschitz claim (max of affine path functionals)
/// and a bounded strategy, then evaluates one of the bound checks.
/// Instance i is generated from seed + i, so results do not depend on
/// the worker count; outputs are ordered by instance index.
struct SuiteConfig {
  int instances = 100;
  std::uint64_t seed = 1;
  Scalar k = 0.8;
  Scalar alpha = 0.3;
  Scalar p = 1.0;
  int max_children = 3;
  int min_horizon = 2;
  int max_horizon = 3;
  int workers = 1;
};

struct SuiteOutcome {
  std::vector<BoundReport> reports;
  int failures = 0;          // slack below -1e-7
  Scalar worst_slack = kInfinity;
};

/// kind: whi | shi | avar | avar_fixed | contraction |
///       contraction_lipschitz | oce
SuiteOutcome run_verifier_suite(const std::string& kind,
                                const SuiteConfig& config);

}  // namespace aw
