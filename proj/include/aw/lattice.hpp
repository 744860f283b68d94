#pragma once

#include "aw/types.hpp"

namespace aw {

/// Recombining binomial martingale model for step counts far beyond what
/// explicit trees can hold (an N-step tree has 2^N leaves; the lattice
/// keeps N+1 states per time).  State (t, k) means k up-moves so far.
struct BinomialLattice {
  int steps = 0;
  Scalar x0 = 0;
  bool multiplicative = false;
  Scalar up = 0;    // additive increment or multiplicative factor
  Scalar down = 0;
  Scalar q = 0.5;   // probability of the up move

  Scalar value(int t, int k) const;
  Scalar increment(int t, int k, bool up_move) const;

  /// Terminal weights by forward induction (stable at N = 100 where
  /// binomial coefficients overflow).
  Vector terminal_weights() const;
};

/// Arithmetic walk with increments +-sigma/sqrt(N), q = 1/2, on [0, 1].
BinomialLattice arithmetic_walk_lattice(int N, Scalar sigma);

/// CRR-style geometric lattice with the exact martingale probability.
BinomialLattice gbm_lattice(int N, Scalar sigma, Scalar T);

/// E[(X_N - K)^+] under the lattice law.
Scalar lattice_call_value(const BinomialLattice& lat, Scalar strike);

/// Largest |delta| of the backward-induction replicating strategy of the
/// call; bounded by 1 for these models, which certifies that the k = 1
/// strategy set contains the perfect hedge.
Scalar lattice_max_call_delta(const BinomialLattice& lat, Scalar strike);

/// Expected total squared increment mismatch E[sum_t (dX_t - dY_t)^2]
/// under the stepwise comonotone coupling of two equal-step martingale
/// lattices, by forward induction over the paired up-count state (the
/// square of the synchronous upper bound for the adapted distance).
Scalar lattice_sync_cost2(const BinomialLattice& a, const BinomialLattice& b);

}  // namespace aw
