#pragma once

#include <cstdint>

#include "aw/distribution.hpp"
#include "aw/tree.hpp"
#include "aw/types.hpp"

namespace aw {

/// Deterministic generator: identical seeds produce identical streams on
/// every platform (no std::*_distribution involved).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  std::uint64_t next_u64();
  Scalar uniform();                       // [0, 1)
  Scalar uniform(Scalar lo, Scalar hi);
  int uniform_int(int lo, int hi);        // inclusive bounds

 private:
  std::uint64_t state_;
};

struct RandomTreeSpec {
  int min_horizon = 2;
  int max_horizon = 3;
  int max_children = 4;
  Scalar root_value = 0.0;
  Scalar step_scale = 1.0;
  bool martingale = false;  // when set, child values are recentred so
                            // every conditional mean increment vanishes
};

ScenarioTree random_tree(Rng& rng, const RandomTreeSpec& spec);

DiscreteDistribution random_distribution(Rng& rng, Index max_atoms = 8,
                                         Scalar scale = 2.0);

/// Random convex piecewise-linear function as a maximum of affine pieces
/// with slopes bounded by the given Lipschitz constant.
struct PiecewiseMaxAffine {
  std::vector<std::pair<Scalar, Scalar>> pieces;  // (slope, intercept)
  Scalar operator()(Scalar x) const;
  Scalar lipschitz() const;
};
PiecewiseMaxAffine random_convex_lipschitz(Rng& rng, Scalar max_slope,
                                           int max_pieces = 4);

}  // namespace aw

#include "aw/hedging.hpp"

namespace aw {

/// Random Lipschitz claim: max of affine path functionals
/// max_k (sum_t a_{k,t} x_t + b_k); the declared constant is
/// max_k sum_t |a_{k,t}|, tight for the sup-norm path metric.
Claim random_lipschitz_claim(Rng& rng, int horizon, Scalar max_lipschitz,
                             int max_pieces = 3);

/// Uniform node positions in [-k, k].
Strategy random_node_strategy(Rng& rng, const ScenarioTree& tree, Scalar k);

/// Affine-in-prefix position clamped into [-k, k]; prefix-Lipschitz with
/// certificate at most the sum of the |weights| per time.
PathStrategy random_path_strategy(Rng& rng, int horizon, Scalar k,
                                  Scalar weight_scale = 0.6);

}  // namespace aw
