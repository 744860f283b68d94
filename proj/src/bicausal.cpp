#include "aw/bicausal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace aw {

namespace {

// Leaf indices grouped by the node sitting at time t, in path order.
std::vector<std::vector<Index>> prefix_classes(const PathLaw& law, int t) {
  std::map<int, Index> group_of;
  std::vector<std::vector<Index>> groups;
  for (Index i = 0; i < law.path_count(); ++i) {
    const int node = law.nodes[i][t];
    auto [it, inserted] = group_of.try_emplace(node, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(i);
  }
  return groups;
}

}  // namespace

Scalar BiCausalCoupling::marginal_residual() const {
  const Scalar row = (weights.rowwise().sum() - lawP.probs).cwiseAbs().maxCoeff();
  const Scalar col =
      (weights.colwise().sum().transpose() - lawQ.probs).cwiseAbs().maxCoeff();
  return std::max(row, col);
}

namespace {

Scalar one_sided_causality(const PathLaw& lawA, const PathLaw& lawB,
                           const Matrix& w) {
  // w is indexed (A-path, B-path).
  Scalar worst = 0;
  for (int t = 1; t < lawA.horizon; ++t) {
    const auto a_groups = prefix_classes(lawA, t);
    const auto b_groups = prefix_classes(lawB, t);
    // Mass sent from each A-path into each B-prefix class.
    Matrix mass(lawA.path_count(), static_cast<Index>(b_groups.size()));
    mass.setZero();
    for (size_t g = 0; g < b_groups.size(); ++g)
      for (Index j : b_groups[g])
        mass.col(static_cast<Index>(g)) += w.col(j);
    for (const auto& grp : a_groups) {
      for (size_t a = 0; a < grp.size(); ++a) {
        for (size_t b = a + 1; b < grp.size(); ++b) {
          const Index ia = grp[a], ib = grp[b];
          for (Index g = 0; g < mass.cols(); ++g) {
            const Scalar r = lawA.probs[ib] * mass(ia, g) -
                             lawA.probs[ia] * mass(ib, g);
            worst = std::max(worst, std::abs(r));
          }
        }
      }
    }
  }
  return worst;
}

}  // namespace

Scalar BiCausalCoupling::causality_residual() const {
  const Scalar xy = one_sided_causality(lawP, lawQ, weights);
  const Scalar yx = one_sided_causality(lawQ, lawP, weights.transpose());
  return std::max(xy, yx);
}

Scalar BiCausalCoupling::max_invariant_residual() const {
  return std::max(marginal_residual(), causality_residual());
}

Scalar BiCausalCoupling::expected_cost(const Matrix& cost) const {
  return (weights.array() * cost.array()).sum();
}

Matrix pair_cost(const TreeData& P, const TreeData& Q, Scalar p) {
  if (P.tree.horizon != Q.tree.horizon)
    throw std::invalid_argument("pair_cost: horizon mismatch");
  const Index n = P.law.path_count();
  const Index m = Q.law.path_count();
  const int T = P.tree.horizon;
  Matrix cost(n, m);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < m; ++j) {
      Scalar qv = 0, fv = 0;
      for (int t = 1; t <= T; ++t) {
        const Scalar dm = P.decomp.martingale[P.law.nodes[i][t]] -
                          Q.decomp.martingale[Q.law.nodes[j][t]];
        const Scalar da = P.decomp.drift[P.law.nodes[i][t - 1]] -
                          Q.decomp.drift[Q.law.nodes[j][t - 1]];
        qv += dm * dm;
        fv += std::abs(da);
      }
      cost(i, j) = std::pow(qv, p / 2) + std::pow(fv, p);
    }
  }
  return cost;
}

AdaptedDistanceResult adapted_wasserstein_lp(const TreeData& P,
                                             const TreeData& Q, Scalar p,
                                             Index budget) {
  if (p < 1) throw std::invalid_argument("adapted_wasserstein_lp: p must be >= 1");
  if (P.tree.horizon != Q.tree.horizon)
    throw std::invalid_argument("adapted_wasserstein_lp: horizon mismatch");
  const Index n = P.law.path_count();
  const Index m = Q.law.path_count();
  if (n * m > budget)
    throw std::length_error(
        "adapted_wasserstein_lp: " + std::to_string(n * m) +
        " coupling variables exceed the solver budget of " +
        std::to_string(budget));

  const Matrix cost = pair_cost(P, Q, p);
  const int T = P.tree.horizon;

  // Count causality rows first: consecutive same-prefix pairs times the
  // number of opposite-side prefix classes, both directions.
  Index n_causal = 0;
  std::vector<std::vector<std::vector<Index>>> pgroups(T), qgroups(T);
  for (int t = 1; t < T; ++t) {
    pgroups[t] = prefix_classes(P.law, t);
    qgroups[t] = prefix_classes(Q.law, t);
    Index pc = 0, qc = 0;
    for (const auto& g : pgroups[t]) pc += static_cast<Index>(g.size()) - 1;
    for (const auto& g : qgroups[t]) qc += static_cast<Index>(g.size()) - 1;
    n_causal += pc * static_cast<Index>(qgroups[t].size()) +
                qc * static_cast<Index>(pgroups[t].size());
  }

  const Index rows = n + m + n_causal;
  const Index cols = n * m;
  detail::DenseSimplex<Scalar>::Mat A =
      detail::DenseSimplex<Scalar>::Mat::Zero(rows, cols);
  Vector b = Vector::Zero(rows);
  Vector c(cols);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < m; ++j) c[i * m + j] = cost(i, j);

  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < m; ++j) A(i, i * m + j) = 1.0;
    b[i] = P.law.probs[i];
  }
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < n; ++i) A(n + j, i * m + j) = 1.0;
    b[n + j] = Q.law.probs[j];
  }

  Index row = n + m;
  for (int t = 1; t < T; ++t) {
    for (const auto& grp : pgroups[t]) {
      for (size_t a = 0; a + 1 < grp.size(); ++a) {
        const Index ia = grp[a], ib = grp[a + 1];
        for (const auto& vgrp : qgroups[t]) {
          for (Index j : vgrp) {
            A(row, ia * m + j) += P.law.probs[ib];
            A(row, ib * m + j) -= P.law.probs[ia];
          }
          ++row;
        }
      }
    }
    for (const auto& grp : qgroups[t]) {
      for (size_t a = 0; a + 1 < grp.size(); ++a) {
        const Index ja = grp[a], jb = grp[a + 1];
        for (const auto& ugrp : pgroups[t]) {
          for (Index i : ugrp) {
            A(row, i * m + ja) += Q.law.probs[jb];
            A(row, i * m + jb) -= Q.law.probs[ja];
          }
          ++row;
        }
      }
    }
  }

  detail::DenseSimplex<Scalar> solver(std::move(A), std::move(b), std::move(c));
  AdaptedDistanceResult out;
  out.lp_variables = cols;
  out.lp_rows = rows;
  out.status = solver.solve();
  out.lp_iterations = solver.iterations();
  if (out.status != LpStatus::optimal) return out;

  const Vector x = solver.solution();
  out.coupling.lawP = P.law;
  out.coupling.lawQ = Q.law;
  out.coupling.weights.resize(n, m);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < m; ++j)
      out.coupling.weights(i, j) = std::max(x[i * m + j], 0.0);
  out.expected_cost = std::max(out.coupling.expected_cost(cost), 0.0);
  // Vertex solutions carry the objective exactly up to roundoff; values
  // below the accumulation floor would otherwise get amplified by the
  // p-th root (sqrt(1e-16) = 1e-8) and break the zero self-distance.
  const Scalar noise_floor =
      1e-13 * (1.0 + cost.cwiseAbs().maxCoeff());
  if (out.expected_cost < noise_floor) out.expected_cost = 0.0;
  out.value = std::pow(out.expected_cost, 1.0 / p);
  return out;
}

AdaptedDistanceResult adapted_wasserstein_lp(const ScenarioTree& P,
                                             const ScenarioTree& Q, Scalar p,
                                             Index budget) {
  return adapted_wasserstein_lp(TreeData(P), TreeData(Q), p, budget);
}

Scalar nested_value_dp(const ScenarioTree& P, const ScenarioTree& Q,
                       const StageCost& stage) {
  require_valid(P);
  require_valid(Q);
  if (P.horizon != Q.horizon)
    throw std::invalid_argument("nested_value_dp: horizon mismatch");
  Matrix V = Matrix::Zero(P.node_count(), Q.node_count());
  for (int t = P.horizon - 1; t >= 0; --t) {
    for (int u : P.nodes_at_time(t)) {
      const auto& cu = P.nodes[u].children;
      for (int v : Q.nodes_at_time(t)) {
        const auto& cv = Q.nodes[v].children;
        Matrix cost(cu.size(), cv.size());
        Vector mu(cu.size()), nu(cv.size());
        for (size_t a = 0; a < cu.size(); ++a) {
          mu[a] = P.nodes[cu[a]].prob;
          for (size_t bidx = 0; bidx < cv.size(); ++bidx)
            cost(a, bidx) = stage(P, cu[a], Q, cv[bidx]) + V(cu[a], cv[bidx]);
        }
        for (size_t bidx = 0; bidx < cv.size(); ++bidx)
          nu[bidx] = Q.nodes[cv[bidx]].prob;
        const TransportResult ot = optimal_transport(mu, nu, cost);
        if (ot.status != LpStatus::optimal)
          throw std::runtime_error("nested_value_dp: inner transport failed");
        V(u, v) = ot.value;
      }
    }
  }
  return V(0, 0);
}

Scalar adapted_wasserstein_dp_aw2(const ScenarioTree& P,
                                  const ScenarioTree& Q) {
  if (!is_martingale(P) || !is_martingale(Q))
    throw std::invalid_argument(
        "adapted_wasserstein_dp_aw2: the adapted cost is stage-additive only "
        "for martingale marginals (the drift term couples time steps); use "
        "adapted_wasserstein_lp for general trees");
  const StageCost stage = [](const ScenarioTree& tp, int cp,
                             const ScenarioTree& tq, int cq) {
    const Scalar dx = tp.nodes[cp].value - tp.nodes[tp.nodes[cp].parent].value;
    const Scalar dy = tq.nodes[cq].value - tq.nodes[tq.nodes[cq].parent].value;
    return (dx - dy) * (dx - dy);
  };
  return std::sqrt(std::max(nested_value_dp(P, Q, stage), 0.0));
}

BiCausalCoupling synchronous_coupling(const TreeData& P, const TreeData& Q) {
  if (P.tree.horizon != Q.tree.horizon)
    throw std::invalid_argument("synchronous_coupling: horizon mismatch");
  const Index n = P.law.path_count();
  const Index m = Q.law.path_count();

  std::vector<Index> leaf_index_p(P.tree.nodes.size(), -1);
  std::vector<Index> leaf_index_q(Q.tree.nodes.size(), -1);
  for (Index i = 0; i < n; ++i) leaf_index_p[P.law.leaf(i)] = i;
  for (Index j = 0; j < m; ++j) leaf_index_q[Q.law.leaf(j)] = j;

  BiCausalCoupling pi;
  pi.lawP = P.law;
  pi.lawQ = Q.law;
  pi.weights = Matrix::Zero(n, m);

  auto sorted_children = [](const ScenarioTree& tree, int u) {
    std::vector<int> ch = tree.nodes[u].children;
    std::sort(ch.begin(), ch.end(), [&](int a, int b) {
      return tree.nodes[a].value != tree.nodes[b].value
                 ? tree.nodes[a].value < tree.nodes[b].value
                 : a < b;
    });
    return ch;
  };

  struct Item { int u, v; Scalar mass; };
  std::vector<Item> stack{{0, 0, 1.0}};
  while (!stack.empty()) {
    const Item it = stack.back();
    stack.pop_back();
    const bool leaf_p = P.tree.is_leaf(it.u);
    const bool leaf_q = Q.tree.is_leaf(it.v);
    if (leaf_p && leaf_q) {
      pi.weights(leaf_index_p[it.u], leaf_index_q[it.v]) += it.mass;
      continue;
    }
    // Quantile (comonotone) coupling of the two child transition laws.
    const auto cp = sorted_children(P.tree, it.u);
    const auto cq = sorted_children(Q.tree, it.v);
    size_t a = 0, b = 0;
    Scalar pa = P.tree.nodes[cp[0]].prob;
    Scalar pb = Q.tree.nodes[cq[0]].prob;
    while (a < cp.size() && b < cq.size()) {
      const Scalar mass = std::min(pa, pb);
      if (mass > 0) stack.push_back({cp[a], cq[b], it.mass * mass});
      pa -= mass;
      pb -= mass;
      if (pa <= pb) {
        if (++a < cp.size()) pa = P.tree.nodes[cp[a]].prob;
      } else {
        if (++b < cq.size()) pb = Q.tree.nodes[cq[b]].prob;
      }
    }
  }
  return pi;
}

Scalar coupling_value(const BiCausalCoupling& pi, const TreeData& P,
                      const TreeData& Q, Scalar p) {
  const Matrix cost = pair_cost(P, Q, p);
  return std::pow(std::max(pi.expected_cost(cost), 0.0), 1.0 / p);
}

bool MetricAxiomReport::passed(Scalar tol) const {
  return violations.empty() && worst_symmetry_gap <= tol &&
         worst_triangle_slack >= -tol && identity_consistent;
}

MetricAxiomReport check_metric_axioms(const std::vector<ScenarioTree>& trees,
                                      Scalar p, Scalar tol) {
  if (trees.size() < 3)
    throw std::invalid_argument("check_metric_axioms: need at least 3 trees");
  const size_t n = trees.size();
  std::vector<TreeData> data;
  data.reserve(n);
  for (const auto& t : trees) data.emplace_back(t);

  Matrix dist(n, n);
  dist.setZero();
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      if (i != j)
        dist(i, j) = adapted_wasserstein_lp(data[i], data[j], p).value;

  MetricAxiomReport rep;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      rep.worst_symmetry_gap =
          std::max(rep.worst_symmetry_gap, std::abs(dist(i, j) - dist(j, i)));
      const bool zero = dist(i, j) < 1e-8;
      const bool equal = same_path_law(trees[i], trees[j]);
      if (zero != equal) {
        rep.identity_consistent = false;
        rep.violations.push_back(
            "identity of indiscernibles fails for pair (" +
            std::to_string(i) + "," + std::to_string(j) + "): distance " +
            std::to_string(dist(i, j)) + ", laws " +
            (equal ? "equal" : "different"));
      }
    }
  }
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      for (size_t k = 0; k < n; ++k) {
        if (i == j || j == k || i == k) continue;
        const Scalar slack = dist(i, j) + dist(j, k) - dist(i, k);
        rep.worst_triangle_slack = std::min(rep.worst_triangle_slack, slack);
      }
  if (rep.worst_symmetry_gap > tol)
    rep.violations.push_back("symmetry gap " +
                             std::to_string(rep.worst_symmetry_gap));
  if (rep.worst_triangle_slack < -tol)
    rep.violations.push_back("triangle slack " +
                             std::to_string(rep.worst_triangle_slack));
  return rep;
}

}  // namespace aw
