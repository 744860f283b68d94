#pragma once

#include <string>
#include <vector>

#include "aw/distribution.hpp"
#include "aw/types.hpp"

namespace aw {

struct TreeNode {
  Scalar value = 0;
  int time = 0;
  int parent = -1;             // -1 for the root
  Scalar prob = 1.0;           // transition probability from the parent
  std::vector<int> children;   // indices into ScenarioTree::nodes
};

/// Finite-depth rooted tree encoding the law of a discrete-time process.
/// Node values are price levels, edge weights transition probabilities.
/// The root sits at time 0 and carries the deterministic start value;
/// every leaf sits at time `horizon`.
///
/// Immutable after construction: all algorithms treat trees as values and
/// never mutate their input.
struct ScenarioTree {
  int horizon = 0;
  std::vector<TreeNode> nodes;

  int add_root(Scalar value);
  int add_child(int parent, Scalar value, Scalar prob);

  Index node_count() const { return static_cast<Index>(nodes.size()); }
  bool is_leaf(int u) const { return nodes[u].children.empty(); }

  std::vector<int> nodes_at_time(int t) const;
  std::vector<int> leaves() const;

  /// Ancestor of `u` at time t (u itself if nodes[u].time == t).
  int ancestor_at(int u, int t) const;

  /// Root-to-node value sequence, length nodes[u].time + 1.
  std::vector<Scalar> prefix_values(int u) const;

  /// Unconditional probability of reaching node u.
  Scalar node_probability(int u) const;

  /// Law of the one-step increment out of node u (children values minus
  /// the node value, weighted by transition probabilities).
  DiscreteDistribution transition_law(int u) const;

  ScenarioTree scaled(Scalar lambda) const;
};

/// One row per leaf: the full value path (length horizon+1, starting at
/// the root value) together with its probability and the node index at
/// every time step.  Leaf order is depth-first in stored child order.
struct PathLaw {
  int horizon = 0;
  Matrix values;                       // paths x (horizon+1)
  Vector probs;
  std::vector<std::vector<int>> nodes; // paths x (horizon+1), node ids

  Index path_count() const { return probs.size(); }
  int leaf(Index i) const { return nodes[i].back(); }

  /// Sup-norm distance between path i of this law and path j of other.
  Scalar sup_distance(Index i, const PathLaw& other, Index j) const;

  DiscreteDistribution terminal_law() const;
};

/// Empty report means the tree satisfies every structural invariant.
std::vector<std::string> validate(const ScenarioTree& tree);

void require_valid(const ScenarioTree& tree);

/// Depth-first leaf enumeration; rejects invalid trees.
PathLaw to_path_law(const ScenarioTree& tree);

/// Children sorted by value, equal-value siblings merged with summed
/// probability (their subtrees mix accordingly).  Idempotent and
/// path-law preserving.
ScenarioTree canonicalize(const ScenarioTree& tree);

bool structurally_equal(const ScenarioTree& a, const ScenarioTree& b,
                        Scalar tol = 0.0);

/// Equality of the canonical path laws within the given tolerances.
bool same_path_law(const ScenarioTree& a, const ScenarioTree& b,
                   Scalar value_tol = 1e-9, Scalar prob_tol = 1e-9);

/// Single-path tree of constant value (the null model delta_x0).
ScenarioTree constant_tree(int horizon, Scalar value);

/// Builds a tree from explicit paths (values include the time-0 root
/// value, which must agree across paths).  Shared prefixes are merged,
/// so the result is the canonical prefix tree of the given law.
ScenarioTree tree_from_paths(const std::vector<std::vector<Scalar>>& paths,
                             const std::vector<Scalar>& probs);

}  // namespace aw
