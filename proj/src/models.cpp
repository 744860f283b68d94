#include "aw/models.hpp"

#include <cmath>
#include <stdexcept>

namespace aw {

TimeFunction constant_schedule(Scalar value) {
  return [value](Scalar) { return value; };
}

TimeFunction step_schedule(std::vector<Scalar> per_step_values, Scalar dt) {
  return [vals = std::move(per_step_values), dt](Scalar t) {
    long i = static_cast<long>(std::floor(t / dt + 0.5));
    i = std::min(std::max(i, 0l), static_cast<long>(vals.size()) - 1);
    return vals[static_cast<size_t>(i)];
  };
}

std::pair<Vector, Vector> gauss_hermite_standard_normal(int m) {
  if (m < 2)
    throw std::invalid_argument("gauss_hermite: need at least 2 points");
  // Golub-Welsch on the Hermite Jacobi matrix (probabilists' weight):
  // off-diagonal sqrt(i), eigenvalues = nodes, weights from the first
  // eigenvector components.
  Matrix J = Matrix::Zero(m, m);
  for (int i = 1; i < m; ++i) {
    const Scalar off = std::sqrt(static_cast<Scalar>(i));
    J(i, i - 1) = off;
    J(i - 1, i) = off;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(J);
  Vector nodes = es.eigenvalues();
  Vector weights(m);
  for (int i = 0; i < m; ++i) {
    const Scalar w0 = es.eigenvectors()(0, i);
    weights[i] = w0 * w0;
  }
  weights /= weights.sum();
  // Symmetrize: pair up +-nodes so the mean is exactly zero.
  for (int i = 0; i < m / 2; ++i) {
    const Scalar v = 0.5 * (nodes[m - 1 - i] - nodes[i]);
    nodes[i] = -v;
    nodes[m - 1 - i] = v;
    const Scalar w = 0.5 * (weights[i] + weights[m - 1 - i]);
    weights[i] = w;
    weights[m - 1 - i] = w;
  }
  if (m % 2 == 1) nodes[m / 2] = 0.0;
  return {nodes, weights};
}

namespace {

void grow_walk(ScenarioTree& tree, int u, int N, const TimeFunction& sigma,
               const Vector& nodes, const Vector& weights) {
  const int t = tree.nodes[u].time;
  if (t == N) return;
  const Scalar s = sigma(static_cast<Scalar>(t) / N);
  if (s < 0) throw std::invalid_argument("random_walk_tree: sigma < 0");
  const Scalar scale = s / std::sqrt(static_cast<Scalar>(N));
  if (scale == 0.0) {
    const int c = tree.add_child(u, tree.nodes[u].value, 1.0);
    grow_walk(tree, c, N, sigma, nodes, weights);
    return;
  }
  for (Index i = 0; i < nodes.size(); ++i) {
    const int c =
        tree.add_child(u, tree.nodes[u].value + scale * nodes[i], weights[i]);
    grow_walk(tree, c, N, sigma, nodes, weights);
  }
}

}  // namespace

ScenarioTree random_walk_tree(int N, const TimeFunction& sigma,
                              const Quantization& quant) {
  if (N < 1) throw std::invalid_argument("random_walk_tree: N must be >= 1");
  Vector nodes, weights;
  if (quant.kind == Quantization::binomial) {
    nodes = Vector(2);
    nodes << -1.0, 1.0;
    weights = Vector::Constant(2, 0.5);
  } else {
    std::tie(nodes, weights) = gauss_hermite_standard_normal(quant.points);
  }
  ScenarioTree tree;
  tree.horizon = N;
  tree.add_root(0.0);
  grow_walk(tree, 0, N, sigma, nodes, weights);
  return tree;
}

ScenarioTree gbm_tree(int N, Scalar sigma, Scalar T) {
  if (N < 1 || T <= 0 || sigma < 0)
    throw std::invalid_argument("gbm_tree: degenerate parameters");
  const Scalar dt = T / N;
  const Scalar u = std::exp(sigma * std::sqrt(dt));
  const Scalar d = 1.0 / u;
  // Exact one-step martingale probability; 1/2 in the degenerate case.
  const Scalar q = sigma > 0 ? (1.0 - d) / (u - d) : 0.5;

  ScenarioTree tree;
  tree.horizon = N;
  tree.add_root(1.0);
  std::vector<int> frontier{0};
  for (int t = 0; t < N; ++t) {
    std::vector<int> next;
    for (int node : frontier) {
      const Scalar x = tree.nodes[node].value;
      next.push_back(tree.add_child(node, x * u, q));
      next.push_back(tree.add_child(node, x * d, 1.0 - q));
    }
    frontier = std::move(next);
  }
  return tree;
}

ScenarioTree drift_diffusion_tree(int N, const TimeFunction& mu,
                                  const StateFunction& sigma, Scalar T,
                                  Scalar x0) {
  if (N < 1) throw std::invalid_argument("drift_diffusion_tree: N >= 1");
  const Scalar dt = T / N;
  const Scalar sq = std::sqrt(dt);
  ScenarioTree tree;
  tree.horizon = N;
  tree.add_root(x0);
  std::vector<int> frontier{0};
  for (int t = 0; t < N; ++t) {
    const Scalar time = t * dt;
    const Scalar drift = mu(time) * dt;
    std::vector<int> next;
    for (int node : frontier) {
      const Scalar x = tree.nodes[node].value;
      const Scalar vol = sigma(time, x);
      if (vol < 0)
        throw std::invalid_argument("drift_diffusion_tree: sigma < 0");
      if (vol == 0.0) {
        next.push_back(tree.add_child(node, x + drift, 1.0));
      } else {
        next.push_back(tree.add_child(node, x + drift + vol * sq, 0.5));
        next.push_back(tree.add_child(node, x + drift - vol * sq, 0.5));
      }
    }
    frontier = std::move(next);
  }
  return tree;
}

Scalar walk_scaling_identity(int N, const TimeFunction& s1,
                             const TimeFunction& s2) {
  Scalar acc = 0;
  for (int n = 0; n < N; ++n) {
    const Scalar t = static_cast<Scalar>(n) / N;
    const Scalar d = s1(t) - s2(t);
    acc += d * d / N;
  }
  return std::sqrt(acc);
}

Claim call_claim(Scalar strike) {
  Claim c;
  c.payoff = [strike](const std::vector<Scalar>& path) {
    return std::max(path.back() - strike, 0.0);
  };
  c.lipschitz = 1.0;
  return c;
}

std::pair<ScenarioTree, ScenarioTree> figure1_pair(Scalar delta) {
  ScenarioTree P;
  P.horizon = 2;
  P.add_root(1.0);
  const int mid = P.add_child(0, 1.0, 1.0);
  P.add_child(mid, 2.0, 0.5);
  P.add_child(mid, 0.0, 0.5);

  ScenarioTree Q;
  Q.horizon = 2;
  Q.add_root(1.0);
  const int up = Q.add_child(0, 1.0 + delta, 0.5);
  const int dn = Q.add_child(0, 1.0 - delta, 0.5);
  Q.add_child(up, 2.0, 1.0);
  Q.add_child(dn, 0.0, 1.0);
  return {P, Q};
}

std::pair<ScenarioTree, ScenarioTree> remark51_pair(int n) {
  ScenarioTree Pn;
  Pn.horizon = 2;
  Pn.add_root(0.0);
  const int up = Pn.add_child(0, 1.0 / n, 0.5);
  const int dn = Pn.add_child(0, -1.0 / n, 0.5);
  Pn.add_child(up, 1.0, 0.5);
  Pn.add_child(up, 0.0, 0.5);
  Pn.add_child(dn, 0.0, 0.5);
  Pn.add_child(dn, -1.0, 0.5);

  ScenarioTree P;
  P.horizon = 2;
  P.add_root(0.0);
  const int mid = P.add_child(0, 0.0, 1.0);
  P.add_child(mid, 1.0, 0.25);
  P.add_child(mid, 0.0, 0.5);
  P.add_child(mid, -1.0, 0.25);
  return {Pn, P};
}

std::pair<ScenarioTree, ScenarioTree> remark53_pair(Scalar eps) {
  ScenarioTree Pe;
  Pe.horizon = 2;
  Pe.add_root(0.0);
  const int mid = Pe.add_child(0, 0.0, 1.0);
  Pe.add_child(mid, eps, 1.0 - eps);
  Pe.add_child(mid, -eps, eps);

  return {Pe, constant_tree(2, 0.0)};
}

std::pair<ScenarioTree, ScenarioTree> contraction_cex_pair(Scalar eps) {
  ScenarioTree Pe;
  Pe.horizon = 2;
  Pe.add_root(0.0);
  const int up = Pe.add_child(0, eps, 0.5);
  const int dn = Pe.add_child(0, -eps, 0.5);
  for (int node : {up, dn}) {
    Pe.add_child(node, 1.0, 0.5);
    Pe.add_child(node, -1.0, 0.5);
  }

  ScenarioTree P;
  P.horizon = 2;
  P.add_root(0.0);
  const int mid = P.add_child(0, 0.0, 1.0);
  P.add_child(mid, 1.0, 0.5);
  P.add_child(mid, -1.0, 0.5);
  return {Pe, P};
}

std::pair<ScenarioTree, ScenarioTree> sign_drift_pair(Scalar c, Scalar sigma) {
  auto build = [&](Scalar drift_sign) {
    ScenarioTree t;
    t.horizon = 2;
    t.add_root(0.0);
    const int up = t.add_child(0, sigma, 0.5);
    const int dn = t.add_child(0, -sigma, 0.5);
    for (int node : {up, dn}) {
      const Scalar x = t.nodes[node].value;
      const Scalar drift = drift_sign * c * (x > 0 ? 1.0 : -1.0);
      t.add_child(node, x + drift + sigma, 0.5);
      t.add_child(node, x + drift - sigma, 0.5);
    }
    return t;
  };
  return {build(1.0), build(-1.0)};
}

std::vector<NamedTree> counterexample_suite(int n, Scalar eps) {
  std::vector<NamedTree> out;
  const auto fig = figure1_pair(eps);
  out.push_back({"figure1_flat", fig.first});
  out.push_back({"figure1_split", fig.second});
  const auto r51 = remark51_pair(n);
  out.push_back({"remark51_Pn", r51.first});
  out.push_back({"remark51_P", r51.second});
  const auto r53 = remark53_pair(eps);
  out.push_back({"remark53_Peps", r53.first});
  out.push_back({"remark53_null", r53.second});
  const auto cex = contraction_cex_pair(eps);
  out.push_back({"contraction_Peps", cex.first});
  out.push_back({"contraction_P", cex.second});
  return out;
}

}  // namespace aw
