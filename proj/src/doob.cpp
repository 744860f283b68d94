#include "aw/doob.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace aw {

Decomposition doob_decompose(const ScenarioTree& tree) {
  require_valid(tree);
  Decomposition d;
  d.drift.assign(tree.nodes.size(), 0.0);
  d.martingale.assign(tree.nodes.size(), 0.0);
  for (size_t u = 0; u < tree.nodes.size(); ++u) {
    const TreeNode& n = tree.nodes[u];
    if (n.children.empty()) continue;
    Scalar mean = 0;
    for (int c : n.children) mean += tree.nodes[c].prob * tree.nodes[c].value;
    d.drift[u] = mean - n.value;
    for (int c : n.children)
      d.martingale[c] = (tree.nodes[c].value - n.value) - d.drift[u];
  }
  return d;
}

Scalar Decomposition::path_quadratic_variation(
    const std::vector<int>& path_nodes) const {
  Scalar qv = 0;
  for (size_t t = 1; t < path_nodes.size(); ++t)
    qv += martingale[path_nodes[t]] * martingale[path_nodes[t]];
  return qv;
}

Scalar Decomposition::path_first_variation(
    const std::vector<int>& path_nodes) const {
  Scalar v = 0;
  for (size_t t = 1; t < path_nodes.size(); ++t)
    v += std::abs(drift[path_nodes[t - 1]]);
  return v;
}

std::string Decomposition::to_csv(const ScenarioTree& tree) const {
  std::ostringstream out;
  out << "node,time,value,delta_a\n";
  for (size_t u = 0; u < tree.nodes.size(); ++u)
    if (!tree.nodes[u].children.empty())
      out << u << ',' << tree.nodes[u].time << ',' << tree.nodes[u].value
          << ',' << drift[u] << '\n';
  out << "edge_parent,edge_child,delta_m\n";
  for (size_t c = 1; c < tree.nodes.size(); ++c)
    out << tree.nodes[c].parent << ',' << c << ',' << martingale[c] << '\n';
  return out.str();
}

Scalar martingale_residual(const ScenarioTree& tree, const Decomposition& d) {
  Scalar worst = 0;
  for (size_t u = 0; u < tree.nodes.size(); ++u) {
    if (tree.nodes[u].children.empty()) continue;
    Scalar s = 0;
    for (int c : tree.nodes[u].children)
      s += tree.nodes[c].prob * d.martingale[c];
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

bool is_martingale(const ScenarioTree& tree, Scalar tol) {
  const Decomposition d = doob_decompose(tree);
  for (size_t u = 0; u < tree.nodes.size(); ++u)
    if (!tree.nodes[u].children.empty() && std::abs(d.drift[u]) > tol)
      return false;
  return true;
}

Scalar seminorm(const ScenarioTree& tree, Scalar p) {
  if (p < 1) throw std::invalid_argument("seminorm: p must be >= 1");
  const Decomposition d = doob_decompose(tree);
  const PathLaw law = to_path_law(tree);
  Scalar acc = 0;
  for (Index i = 0; i < law.path_count(); ++i) {
    const Scalar qv = d.path_quadratic_variation(law.nodes[i]);
    const Scalar fv = d.path_first_variation(law.nodes[i]);
    acc += law.probs[i] * (std::pow(qv, p / 2) + std::pow(fv, p));
  }
  return std::pow(acc, 1.0 / p);
}

IncrementDelta pair_increments(const ScenarioTree& treeP,
                               const Decomposition& dp,
                               const std::vector<int>& pathP,
                               const ScenarioTree& treeQ,
                               const Decomposition& dq,
                               const std::vector<int>& pathQ) {
  if (treeP.horizon != treeQ.horizon)
    throw std::invalid_argument("pair_increments: horizon mismatch");
  const int T = treeP.horizon;
  IncrementDelta delta;
  delta.martingale.resize(T);
  delta.drift.resize(T);
  for (int t = 1; t <= T; ++t) {
    delta.martingale[t - 1] =
        dp.martingale[pathP[t]] - dq.martingale[pathQ[t]];
    delta.drift[t - 1] = dp.drift[pathP[t - 1]] - dq.drift[pathQ[t - 1]];
  }
  return delta;
}

Scalar ConstantsLedger::bdg(Scalar p) {
  if (p == 1.0) return b1;
  if (p >= 2.0) return p;
  throw std::invalid_argument(
      "bdg constant pinned only for p = 1 and p >= 2");
}

Scalar ConstantsLedger::c_p(Scalar p) {
  if (p == 2.0) return 1.0;
  throw std::invalid_argument("c_p pinned only for p = 2");
}

Scalar ConstantsLedger::beta(Scalar lipschitz_h, Scalar aw2_p_null,
                             Scalar aw2_q_null) {
  return 2.0 * std::sqrt(2.0) * b1 * lipschitz_h *
         std::min(aw2_p_null, aw2_q_null);
}

Scalar ConstantsLedger::avar_rate(Scalar lipschitz_claim, Scalar k,
                                  Scalar alpha) {
  return b1 * (lipschitz_claim + k) / alpha;
}

Scalar ConstantsLedger::alpha_lemma(Scalar p, Scalar lipschitz_h,
                                    Scalar semi2p_p, Scalar semi2p_q) {
  return std::pow(2.0, 3 * p - 2) * std::pow(lipschitz_h, p) * bdg(p) *
         std::sqrt(bdg(2 * p)) *
         std::min(std::pow(semi2p_p, p), std::pow(semi2p_q, p));
}

}  // namespace aw
