#pragma once

#include <vector>

#include "aw/types.hpp"

namespace aw {

/// Finite atomic law on the real line.  Canonical form is sorted by
/// value with equal-value atoms merged; weights sum to one within
/// kProbTolLocal.
struct DiscreteDistribution {
  struct Atom {
    Scalar value = 0;
    Scalar weight = 0;
  };
  std::vector<Atom> atoms;

  static DiscreteDistribution dirac(Scalar x) { return {{{x, 1.0}}}; }

  Index size() const { return static_cast<Index>(atoms.size()); }
  Scalar total_weight() const;
  Scalar mean() const;
  Scalar min_value() const;
  Scalar max_value() const;

  Vector values() const;
  Vector weights() const;

  /// Sorted by value, equal values (within tol) merged, weights renormalized
  /// only in the sense of summation order; total mass is preserved.
  DiscreteDistribution canonical(Scalar merge_tol = 0.0) const;

  /// Empty when valid; otherwise one message per violated invariant.
  std::vector<std::string> validate() const;
};

bool approx_equal(const DiscreteDistribution& a, const DiscreteDistribution& b,
                  Scalar value_tol, Scalar weight_tol);

}  // namespace aw
