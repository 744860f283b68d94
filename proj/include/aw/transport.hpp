#pragma once

#include <utility>

#include "aw/distribution.hpp"
#include "aw/simplex.hpp"
#include "aw/tree.hpp"
#include "aw/types.hpp"

namespace aw {

/// Joint weights over the product of two finite supports with prescribed
/// marginals (row sums mu, column sums nu).
struct Coupling {
  Vector mu;
  Vector nu;
  Matrix weights;

  /// Largest violation among row and column sums.
  Scalar marginal_residual() const;
  std::string to_csv() const;
};

struct TransportResult {
  Scalar value = 0;     // distance (p-th root already taken where applicable)
  Coupling coupling;
  LpStatus status = LpStatus::optimal;
};

/// Exact optimal transport for an explicit cost matrix; returns the
/// un-rooted optimal cost together with an optimal coupling.
TransportResult optimal_transport(const Vector& mu, const Vector& nu,
                                  const Matrix& cost);

/// p-Wasserstein distance between finite laws on the real line.
TransportResult wasserstein(const DiscreteDistribution& mu,
                            const DiscreteDistribution& nu, Scalar p);

/// p-Wasserstein distance between path laws under the sup-norm path
/// metric.
TransportResult wasserstein(const PathLaw& P, const PathLaw& Q, Scalar p);

struct WeakTransportResult {
  Scalar value = 0;       // d_p^w(mu, nu)
  Coupling coupling;
  bool converged = true;
  Scalar gap = 0;         // certified Frank-Wolfe gap (p = 2 only)
  long iterations = 0;
};

/// Weak (barycentric) transport cost d_p^w(mu, nu) for p in {1, 2}.
/// p = 1 is solved exactly as a linear program; p = 2 by Frank-Wolfe
/// with away steps, stopping at a certified gap (< 1e-7; in practice
/// driven much lower) or after 1e5 iterations, whichever happens first.
/// Note d_p^w is not symmetric in its arguments.
WeakTransportResult weak_ot(const DiscreteDistribution& mu,
                            const DiscreteDistribution& nu, int p);

/// Exhaustive oracle for p = 2 on supports of size <= 4: enumerates all
/// zero patterns of the coupling and solves the corresponding
/// equality-constrained quadratic program exactly.
Scalar weak_ot_bruteforce(const DiscreteDistribution& mu,
                          const DiscreteDistribution& nu);

namespace detail {

/// Exact linear minimization of sum_ij a_i b_j gamma_ij over the
/// transportation polytope.  The product cost is a Monge matrix once rows
/// are sorted by a ascending and columns by b descending, so the
/// northwest-corner rule is optimal.  Returns the vertex as sparse
/// (row, col, mass) triples.
std::vector<std::tuple<Index, Index, Scalar>> product_cost_vertex(
    const Vector& a, const Vector& b, const Vector& mu, const Vector& nu);

}  // namespace detail

}  // namespace aw
