#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "aw/hedging.hpp"
#include "aw/tree.hpp"

namespace aw {

/// Deterministic coefficient schedules.  Volatilities must be
/// nonnegative and bounded on the reachable range.
using TimeFunction = std::function<Scalar(Scalar)>;           // of t
using StateFunction = std::function<Scalar(Scalar, Scalar)>;  // of (t, x)

TimeFunction constant_schedule(Scalar value);
TimeFunction step_schedule(std::vector<Scalar> per_step_values, Scalar dt);

struct Quantization {
  enum Kind { binomial, gauss_hermite } kind = binomial;
  int points = 2;

  static Quantization Binomial() { return {binomial, 2}; }
  static Quantization GaussHermite(int m) { return {gauss_hermite, m}; }
};

/// Gauss-Hermite quantization of the standard normal: m points and
/// weights with exact mean zero and (for m >= 2) exact unit variance.
std::pair<Vector, Vector> gauss_hermite_standard_normal(int m);

/// Zero-mean random walk on the unit time interval: N steps, increment
/// out of step n with standard deviation sigma(n/N)/sqrt(N), quantized
/// by two symmetric points or a Gauss-Hermite rule.  Always a martingale.
ScenarioTree random_walk_tree(int N, const TimeFunction& sigma,
                              const Quantization& quant = Quantization::Binomial());

/// Multiplicative binomial martingale started at 1 with log-variance
/// sigma^2 T / N per step to first order; the one-step martingale
/// identity u q + d (1 - q) = 1 holds exactly.
ScenarioTree gbm_tree(int N, Scalar sigma, Scalar T);

/// Euler-type binomial tree dX = mu dt +- sigma sqrt(dt) on [0, T];
/// the Doob drift per step is exactly mu(t) dt.
ScenarioTree drift_diffusion_tree(int N, const TimeFunction& mu,
                                  const StateFunction& sigma, Scalar T = 1.0,
                                  Scalar x0 = 0.0);

/// Closed-form target for the adapted distance between two random walks
/// with binomial quantization: (sum_n (1/N) |s1_n - s2_n|^2)^{1/2}.
Scalar walk_scaling_identity(int N, const TimeFunction& s1,
                             const TimeFunction& s2);

/// European call (X_T - K)^+ with Lipschitz constant 1.
Claim call_claim(Scalar strike = 0.0);

// --- exact counterexample models ---------------------------------------

/// Two-period pair that is close in plain Wasserstein distance yet has a
/// completely different information structure: flat-then-split versus
/// slightly-split-then-split (the split reveals the final move).
std::pair<ScenarioTree, ScenarioTree> figure1_pair(Scalar delta);

/// (P_n, P): first coordinate +-1/n collapsing to 0; the kink carries
/// one bit about the final move, so utility values stay apart while the
/// plain distance vanishes.
std::pair<ScenarioTree, ScenarioTree> remark51_pair(int n);

/// (P^eps, delta_{(0,0)}): vanishing two-point model against the null
/// model; unbounded strategies produce unbounded risk along the sequence.
std::pair<ScenarioTree, ScenarioTree> remark53_pair(Scalar eps);

/// (P_eps, P) with P = delta_0 x ((d_1 + d_-1)/2): the sign of the first
/// tiny move indexes the sign strategy, defeating plain-Wasserstein
/// convergence of hedged payoffs while the adapted distance vanishes.
std::pair<ScenarioTree, ScenarioTree> contraction_cex_pair(Scalar eps);

/// Discrete two-period models with sign-dependent drifts +-c after the
/// first step and volatility sigma; the synchronous coupling costs
/// (2c)^p while flipping the driving noise costs (8 sigma^2)^{p/2}.
std::pair<ScenarioTree, ScenarioTree> sign_drift_pair(Scalar c, Scalar sigma);

struct NamedTree {
  std::string name;
  ScenarioTree tree;
};
std::vector<NamedTree> counterexample_suite(int n = 10, Scalar eps = 0.1);

}  // namespace aw
