#include "aw/generators.hpp"

#include <cmath>

namespace aw {

std::uint64_t Rng::next_u64() {
  // splitmix64: tiny, seed-robust, reproducible everywhere.
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

Scalar Rng::uniform() {
  return std::ldexp(static_cast<Scalar>(next_u64() >> 11), -53);
}

Scalar Rng::uniform(Scalar lo, Scalar hi) { return lo + (hi - lo) * uniform(); }

int Rng::uniform_int(int lo, int hi) {
  return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
}

namespace {

void grow(Rng& rng, const RandomTreeSpec& spec, ScenarioTree& tree, int u) {
  if (tree.nodes[u].time == tree.horizon) return;
  const int nc = rng.uniform_int(1, spec.max_children);
  Vector probs(nc), steps(nc);
  Scalar psum = 0;
  for (int c = 0; c < nc; ++c) {
    probs[c] = 0.1 + rng.uniform();
    psum += probs[c];
    steps[c] = spec.step_scale * rng.uniform(-1.0, 1.0);
  }
  probs /= psum;
  if (spec.martingale) {
    const Scalar mean = probs.dot(steps);
    steps.array() -= mean;
  }
  for (int c = 0; c < nc; ++c) {
    const int id =
        tree.add_child(u, tree.nodes[u].value + steps[c], probs[c]);
    grow(rng, spec, tree, id);
  }
}

}  // namespace

ScenarioTree random_tree(Rng& rng, const RandomTreeSpec& spec) {
  ScenarioTree tree;
  tree.horizon = rng.uniform_int(spec.min_horizon, spec.max_horizon);
  tree.add_root(spec.root_value);
  grow(rng, spec, tree, 0);
  return tree;
}

DiscreteDistribution random_distribution(Rng& rng, Index max_atoms,
                                         Scalar scale) {
  const int n = rng.uniform_int(1, static_cast<int>(max_atoms));
  DiscreteDistribution d;
  Scalar wsum = 0;
  for (int i = 0; i < n; ++i) {
    const Scalar w = 0.05 + rng.uniform();
    d.atoms.push_back({rng.uniform(-scale, scale), w});
    wsum += w;
  }
  for (auto& a : d.atoms) a.weight /= wsum;
  return d.canonical();
}

Scalar PiecewiseMaxAffine::operator()(Scalar x) const {
  Scalar best = -kInfinity;
  for (const auto& [a, b] : pieces) best = std::max(best, a * x + b);
  return best;
}

Scalar PiecewiseMaxAffine::lipschitz() const {
  Scalar L = 0;
  for (const auto& [a, b] : pieces) L = std::max(L, std::abs(a));
  return L;
}

PiecewiseMaxAffine random_convex_lipschitz(Rng& rng, Scalar max_slope,
                                           int max_pieces) {
  PiecewiseMaxAffine f;
  const int n = rng.uniform_int(1, max_pieces);
  for (int i = 0; i < n; ++i)
    f.pieces.push_back(
        {rng.uniform(-max_slope, max_slope), rng.uniform(-1.0, 1.0)});
  return f;
}

Claim random_lipschitz_claim(Rng& rng, int horizon, Scalar max_lipschitz,
                             int max_pieces) {
  const int pieces = rng.uniform_int(1, max_pieces);
  std::vector<std::vector<Scalar>> slopes(pieces);
  std::vector<Scalar> intercepts(pieces);
  Scalar lipschitz = 0;
  for (int p = 0; p < pieces; ++p) {
    slopes[p].resize(horizon + 1);
    Scalar sum = 0;
    for (int t = 0; t <= horizon; ++t) {
      slopes[p][t] = rng.uniform(-1.0, 1.0);
      sum += std::abs(slopes[p][t]);
    }
    const Scalar target = max_lipschitz * (0.2 + 0.8 * rng.uniform());
    for (int t = 0; t <= horizon; ++t) slopes[p][t] *= target / sum;
    intercepts[p] = rng.uniform(-0.5, 0.5);
    lipschitz = std::max(lipschitz, target);
  }
  Claim c;
  c.lipschitz = lipschitz;
  c.payoff = [slopes, intercepts](const std::vector<Scalar>& path) {
    Scalar best = -kInfinity;
    for (size_t p = 0; p < slopes.size(); ++p) {
      Scalar v = intercepts[p];
      for (size_t t = 0; t < path.size(); ++t) v += slopes[p][t] * path[t];
      best = std::max(best, v);
    }
    return best;
  };
  return c;
}

Strategy random_node_strategy(Rng& rng, const ScenarioTree& tree, Scalar k) {
  Strategy s;
  s.bound = k;
  s.position.assign(tree.nodes.size(), 0.0);
  for (size_t u = 0; u < tree.nodes.size(); ++u)
    if (!tree.nodes[u].children.empty()) s.position[u] = rng.uniform(-k, k);
  return s;
}

PathStrategy random_path_strategy(Rng& rng, int horizon, Scalar k,
                                  Scalar weight_scale) {
  std::vector<std::vector<Scalar>> weights(horizon);
  std::vector<Scalar> base(horizon);
  for (int t = 0; t < horizon; ++t) {
    base[t] = rng.uniform(-0.3 * k, 0.3 * k);
    weights[t].resize(t + 1);
    for (int s = 0; s <= t; ++s)
      weights[t][s] = weight_scale * k * rng.uniform(-1.0, 1.0) / (t + 1);
  }
  PathStrategy h;
  h.bound = k;
  h.position = [weights, base, k](int t, const std::vector<Scalar>& prefix) {
    Scalar v = base[t];
    for (int s = 0; s <= t; ++s) v += weights[t][s] * prefix[s];
    return std::clamp(v, -k, k);
  };
  return h;
}

}  // namespace aw
