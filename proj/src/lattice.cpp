#include "aw/lattice.hpp"

#include <cmath>
#include <stdexcept>

namespace aw {

Scalar BinomialLattice::value(int t, int k) const {
  if (multiplicative)
    return x0 * std::pow(up, k) * std::pow(down, t - k);
  return x0 + k * up + (t - k) * down;
}

Scalar BinomialLattice::increment(int t, int k, bool up_move) const {
  const Scalar x = value(t, k);
  if (multiplicative) return x * ((up_move ? up : down) - 1.0);
  (void)x;
  return up_move ? up : down;
}

Vector BinomialLattice::terminal_weights() const {
  Vector w = Vector::Zero(steps + 1);
  w[0] = 1.0;
  for (int t = 0; t < steps; ++t) {
    Vector next = Vector::Zero(steps + 1);
    for (int k = 0; k <= t; ++k) {
      next[k + 1] += w[k] * q;
      next[k] += w[k] * (1.0 - q);
    }
    w = next;
  }
  return w;
}

BinomialLattice arithmetic_walk_lattice(int N, Scalar sigma) {
  if (N < 1) throw std::invalid_argument("arithmetic_walk_lattice: N >= 1");
  BinomialLattice lat;
  lat.steps = N;
  lat.x0 = 0.0;
  lat.multiplicative = false;
  lat.up = sigma / std::sqrt(static_cast<Scalar>(N));
  lat.down = -lat.up;
  lat.q = 0.5;
  return lat;
}

BinomialLattice gbm_lattice(int N, Scalar sigma, Scalar T) {
  if (N < 1 || T <= 0 || sigma < 0)
    throw std::invalid_argument("gbm_lattice: degenerate parameters");
  BinomialLattice lat;
  lat.steps = N;
  lat.x0 = 1.0;
  lat.multiplicative = true;
  lat.up = std::exp(sigma * std::sqrt(T / N));
  lat.down = 1.0 / lat.up;
  lat.q = sigma > 0 ? (1.0 - lat.down) / (lat.up - lat.down) : 0.5;
  return lat;
}

Scalar lattice_call_value(const BinomialLattice& lat, Scalar strike) {
  const Vector w = lat.terminal_weights();
  Scalar v = 0;
  for (int k = 0; k <= lat.steps; ++k)
    v += w[k] * std::max(lat.value(lat.steps, k) - strike, 0.0);
  return v;
}

Scalar lattice_max_call_delta(const BinomialLattice& lat, Scalar strike) {
  // Backward induction of the replication value, tracking the hedge
  // ratio (V_up - V_down) / (x_up - x_down) on every interior node.
  Vector v(lat.steps + 1);
  for (int k = 0; k <= lat.steps; ++k)
    v[k] = std::max(lat.value(lat.steps, k) - strike, 0.0);
  Scalar max_delta = 0;
  for (int t = lat.steps - 1; t >= 0; --t) {
    for (int k = 0; k <= t; ++k) {
      const Scalar xu = lat.value(t + 1, k + 1);
      const Scalar xd = lat.value(t + 1, k);
      const Scalar delta = (v[k + 1] - v[k]) / (xu - xd);
      max_delta = std::max(max_delta, std::abs(delta));
      v[k] = lat.q * v[k + 1] + (1.0 - lat.q) * v[k];
    }
  }
  return max_delta;
}

Scalar lattice_sync_cost2(const BinomialLattice& a, const BinomialLattice& b) {
  if (a.steps != b.steps)
    throw std::invalid_argument("lattice_sync_cost2: step mismatch");
  const int N = a.steps;
  // Comonotone step coupling of the two binary transitions: both move up
  // with probability min(qa, qb), both down with min(1-qa, 1-qb), and
  // the remaining |qa - qb| mass mixes (up with down).
  const Scalar p_uu = std::min(a.q, b.q);
  const Scalar p_dd = std::min(1.0 - a.q, 1.0 - b.q);
  const Scalar p_mix = 1.0 - p_uu - p_dd;
  const bool a_up_in_mix = a.q > b.q;

  // Joint distribution of the paired up-counts (k, l).
  Matrix w = Matrix::Zero(N + 1, N + 1);
  w(0, 0) = 1.0;
  Scalar cost = 0;
  for (int t = 0; t < N; ++t) {
    Matrix next = Matrix::Zero(N + 1, N + 1);
    for (int k = 0; k <= t; ++k) {
      for (int l = 0; l <= t; ++l) {
        const Scalar mass = w(k, l);
        if (mass == 0) continue;
        const Scalar du_a = a.increment(t, k, true);
        const Scalar dd_a = a.increment(t, k, false);
        const Scalar du_b = b.increment(t, l, true);
        const Scalar dd_b = b.increment(t, l, false);
        if (p_uu > 0) {
          cost += mass * p_uu * (du_a - du_b) * (du_a - du_b);
          next(k + 1, l + 1) += mass * p_uu;
        }
        if (p_dd > 0) {
          cost += mass * p_dd * (dd_a - dd_b) * (dd_a - dd_b);
          next(k, l) += mass * p_dd;
        }
        if (p_mix > 0) {
          if (a_up_in_mix) {
            cost += mass * p_mix * (du_a - dd_b) * (du_a - dd_b);
            next(k + 1, l) += mass * p_mix;
          } else {
            cost += mass * p_mix * (dd_a - du_b) * (dd_a - du_b);
            next(k, l + 1) += mass * p_mix;
          }
        }
      }
    }
    w = std::move(next);
  }
  return cost;
}

}  // namespace aw
