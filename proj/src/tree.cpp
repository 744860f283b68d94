#include "aw/tree.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace aw {

int ScenarioTree::add_root(Scalar value) {
  if (!nodes.empty())
    throw std::logic_error("tree already has a root");
  nodes.push_back(TreeNode{value, 0, -1, 1.0, {}});
  return 0;
}

int ScenarioTree::add_child(int parent, Scalar value, Scalar prob) {
  const int id = static_cast<int>(nodes.size());
  nodes.push_back(TreeNode{value, nodes[parent].time + 1, parent, prob, {}});
  nodes[parent].children.push_back(id);
  return id;
}

std::vector<int> ScenarioTree::nodes_at_time(int t) const {
  std::vector<int> out;
  for (int u = 0; u < static_cast<int>(nodes.size()); ++u)
    if (nodes[u].time == t) out.push_back(u);
  return out;
}

std::vector<int> ScenarioTree::leaves() const {
  std::vector<int> out;
  for (int u = 0; u < static_cast<int>(nodes.size()); ++u)
    if (nodes[u].children.empty()) out.push_back(u);
  return out;
}

int ScenarioTree::ancestor_at(int u, int t) const {
  while (nodes[u].time > t) u = nodes[u].parent;
  return u;
}

std::vector<Scalar> ScenarioTree::prefix_values(int u) const {
  std::vector<Scalar> vals(static_cast<size_t>(nodes[u].time) + 1);
  for (int v = u; v >= 0; v = nodes[v].parent) vals[nodes[v].time] = nodes[v].value;
  return vals;
}

Scalar ScenarioTree::node_probability(int u) const {
  Scalar p = 1.0;
  for (int v = u; v >= 0; v = nodes[v].parent) p *= nodes[v].prob;
  return p;
}

DiscreteDistribution ScenarioTree::transition_law(int u) const {
  DiscreteDistribution law;
  for (int c : nodes[u].children)
    law.atoms.push_back({nodes[c].value - nodes[u].value, nodes[c].prob});
  return law;
}

ScenarioTree ScenarioTree::scaled(Scalar lambda) const {
  ScenarioTree out = *this;
  for (auto& n : out.nodes) n.value *= lambda;
  return out;
}

std::vector<std::string> validate(const ScenarioTree& tree) {
  std::vector<std::string> report;
  if (tree.nodes.empty()) {
    report.push_back("tree has no nodes");
    return report;
  }
  if (tree.horizon < 1) report.push_back("horizon must be a positive integer");

  int root_count = 0;
  for (size_t u = 0; u < tree.nodes.size(); ++u) {
    const TreeNode& n = tree.nodes[u];
    if (n.parent < 0) {
      ++root_count;
      if (n.time != 0)
        report.push_back("root node " + std::to_string(u) + " not at time 0");
    } else {
      if (n.time != tree.nodes[n.parent].time + 1)
        report.push_back("node " + std::to_string(u) +
                         ": time is not parent time + 1");
      if (!(n.prob > 0) || n.prob > 1 + kProbTolLocal)
        report.push_back("node " + std::to_string(u) + ": transition probability " +
                         std::to_string(n.prob) + " outside (0,1]");
    }
    if (!std::isfinite(n.value))
      report.push_back("node " + std::to_string(u) + ": non-finite value");

    if (n.children.empty()) {
      if (n.time != tree.horizon)
        report.push_back("leaf " + std::to_string(u) + " at time " +
                         std::to_string(n.time) + " != horizon " +
                         std::to_string(tree.horizon));
    } else {
      Scalar psum = 0;
      for (int c : n.children) {
        if (c < 0 || c >= static_cast<int>(tree.nodes.size()) ||
            tree.nodes[c].parent != static_cast<int>(u)) {
          report.push_back("node " + std::to_string(u) + ": broken child link");
          continue;
        }
        psum += tree.nodes[c].prob;
      }
      if (std::abs(psum - 1.0) > kProbTolLocal)
        report.push_back("node " + std::to_string(u) + ": probability sum " +
                         std::to_string(psum) + " != 1");
    }
  }
  if (root_count != 1)
    report.push_back("tree has " + std::to_string(root_count) +
                     " roots, expected exactly 1");

  if (report.empty()) {
    // Path mass check only makes sense on a structurally sound tree.
    Scalar mass = 0;
    for (int u : tree.leaves()) mass += tree.node_probability(u);
    if (std::abs(mass - 1.0) > kProbTolGlobal)
      report.push_back("path probability sum " + std::to_string(mass) + " != 1");
  }
  return report;
}

void require_valid(const ScenarioTree& tree) {
  const auto report = validate(tree);
  if (!report.empty())
    throw std::invalid_argument("invalid scenario tree: " + report.front());
}

namespace {

void enumerate_paths(const ScenarioTree& tree, int u, Scalar prob,
                     std::vector<int>& stack,
                     std::vector<std::vector<int>>& node_rows,
                     std::vector<Scalar>& probs) {
  stack.push_back(u);
  if (tree.nodes[u].children.empty()) {
    node_rows.push_back(stack);
    probs.push_back(prob);
  } else {
    for (int c : tree.nodes[u].children)
      enumerate_paths(tree, c, prob * tree.nodes[c].prob, stack, node_rows, probs);
  }
  stack.pop_back();
}

}  // namespace

PathLaw to_path_law(const ScenarioTree& tree) {
  require_valid(tree);
  std::vector<std::vector<int>> node_rows;
  std::vector<Scalar> probs;
  std::vector<int> stack;
  enumerate_paths(tree, 0, 1.0, stack, node_rows, probs);

  PathLaw law;
  law.horizon = tree.horizon;
  const Index n = static_cast<Index>(node_rows.size());
  law.values.resize(n, tree.horizon + 1);
  law.probs.resize(n);
  law.nodes = std::move(node_rows);
  for (Index i = 0; i < n; ++i) {
    law.probs[i] = probs[i];
    for (int t = 0; t <= tree.horizon; ++t)
      law.values(i, t) = tree.nodes[law.nodes[i][t]].value;
  }
  return law;
}

Scalar PathLaw::sup_distance(Index i, const PathLaw& other, Index j) const {
  return (values.row(i) - other.values.row(j)).cwiseAbs().maxCoeff();
}

DiscreteDistribution PathLaw::terminal_law() const {
  DiscreteDistribution out;
  for (Index i = 0; i < path_count(); ++i)
    out.atoms.push_back({values(i, horizon), probs[i]});
  return out.canonical();
}

namespace {

// Recursive canonical copy: children ordered by value, equal-value
// siblings merged (their subtrees mixed with the conditional weights).
struct Subtree {
  Scalar value;
  std::vector<std::pair<Scalar, Subtree>> children;  // (prob, subtree)
};

Subtree collect(const ScenarioTree& tree, int u) {
  Subtree s;
  s.value = tree.nodes[u].value;
  for (int c : tree.nodes[u].children)
    s.children.push_back({tree.nodes[c].prob, collect(tree, c)});
  return s;
}

void merge_subtrees(Subtree& a, Scalar wa, const Subtree& b, Scalar wb) {
  // Mixture of the two child transition laws.
  const Scalar total = wa + wb;
  for (auto& [p, child] : a.children) p *= wa / total;
  for (const auto& [p, child] : b.children)
    a.children.push_back({p * wb / total, child});
}

void canonical_sort(Subtree& s) {
  std::sort(s.children.begin(), s.children.end(),
            [](const auto& x, const auto& y) {
              return x.second.value < y.second.value;
            });
  std::vector<std::pair<Scalar, Subtree>> merged;
  for (auto& [p, child] : s.children) {
    if (!merged.empty() && merged.back().second.value == child.value) {
      merge_subtrees(merged.back().second, merged.back().first, child, p);
      merged.back().first += p;
    } else {
      merged.push_back({p, std::move(child)});
    }
  }
  s.children = std::move(merged);
  for (auto& [p, child] : s.children) canonical_sort(child);
}

void emit(const Subtree& s, ScenarioTree& out, int parent, Scalar prob) {
  const int id = parent < 0 ? out.add_root(s.value)
                            : out.add_child(parent, s.value, prob);
  for (const auto& [p, child] : s.children) emit(child, out, id, p);
}

}  // namespace

ScenarioTree canonicalize(const ScenarioTree& tree) {
  Subtree root = collect(tree, 0);
  canonical_sort(root);
  ScenarioTree out;
  out.horizon = tree.horizon;
  emit(root, out, -1, 1.0);
  return out;
}

bool structurally_equal(const ScenarioTree& a, const ScenarioTree& b,
                        Scalar tol) {
  if (a.horizon != b.horizon || a.nodes.size() != b.nodes.size()) return false;
  for (size_t u = 0; u < a.nodes.size(); ++u) {
    const TreeNode& x = a.nodes[u];
    const TreeNode& y = b.nodes[u];
    if (x.time != y.time || x.parent != y.parent || x.children != y.children)
      return false;
    if (std::abs(x.value - y.value) > tol) return false;
    if (std::abs(x.prob - y.prob) > tol) return false;
  }
  return true;
}

bool same_path_law(const ScenarioTree& a, const ScenarioTree& b,
                   Scalar value_tol, Scalar prob_tol) {
  if (a.horizon != b.horizon) return false;
  const PathLaw pa = to_path_law(canonicalize(a));
  const PathLaw pb = to_path_law(canonicalize(b));
  if (pa.path_count() != pb.path_count()) return false;
  for (Index i = 0; i < pa.path_count(); ++i) {
    if (pa.sup_distance(i, pb, i) > value_tol) return false;
    if (std::abs(pa.probs[i] - pb.probs[i]) > prob_tol) return false;
  }
  return true;
}

ScenarioTree constant_tree(int horizon, Scalar value) {
  ScenarioTree tree;
  tree.horizon = horizon;
  int u = tree.add_root(value);
  for (int t = 0; t < horizon; ++t) u = tree.add_child(u, value, 1.0);
  return tree;
}

ScenarioTree tree_from_paths(const std::vector<std::vector<Scalar>>& paths,
                             const std::vector<Scalar>& probs) {
  if (paths.empty() || paths.size() != probs.size())
    throw std::invalid_argument("tree_from_paths: empty or mismatched input");
  const size_t len = paths.front().size();
  for (const auto& p : paths) {
    if (p.size() != len || p.front() != paths.front().front())
      throw std::invalid_argument(
          "tree_from_paths: paths must share length and start value");
  }

  ScenarioTree tree;
  tree.horizon = static_cast<int>(len) - 1;
  tree.add_root(paths.front().front());

  // Insert paths one by one, sharing prefixes; sibling probabilities are
  // accumulated and normalized per node afterwards.
  std::vector<Scalar> reach(1, 0.0);  // unconditional mass through node
  Scalar total = 0;
  for (const Scalar p : probs) total += p;
  for (size_t i = 0; i < paths.size(); ++i) {
    int u = 0;
    reach[0] += probs[i] / total;
    for (size_t t = 1; t < len; ++t) {
      const Scalar v = paths[i][t];
      int next = -1;
      for (int c : tree.nodes[u].children)
        if (tree.nodes[c].value == v) { next = c; break; }
      if (next < 0) {
        next = tree.add_child(u, v, 0.0);
        reach.push_back(0.0);
      }
      reach[next] += probs[i] / total;
      u = next;
    }
  }
  for (size_t u = 0; u < tree.nodes.size(); ++u)
    for (int c : tree.nodes[u].children)
      tree.nodes[c].prob = reach[c] / reach[u];
  return tree;
}

}  // namespace aw
