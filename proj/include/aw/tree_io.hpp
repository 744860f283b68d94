#pragma once

#include <string>

#include "aw/tree.hpp"

namespace aw {

/// Thrown on malformed tree files; the message names the offending node
/// by its JSON path (e.g. "root.children[2]").
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// File format (UTF-8 JSON):
///   {"horizon": T, "root": {"value": v, "children":
///       [{"prob": p, "value": v, "children": [...]}, ...]}}
/// Children lists are empty exactly at depth T.
ScenarioTree load_tree(const std::string& path);
ScenarioTree tree_from_json_text(const std::string& text);

void save_tree(const ScenarioTree& tree, const std::string& path);
std::string tree_to_json_text(const ScenarioTree& tree);

DiscreteDistribution load_distribution(const std::string& path);
void save_distribution(const DiscreteDistribution& dist,
                       const std::string& path);

}  // namespace aw
