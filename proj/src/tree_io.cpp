#include "aw/tree_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace aw {

using nlohmann::json;

namespace {

void parse_node(const json& j, const std::string& where, ScenarioTree& tree,
                int parent, int depth) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  if (!j.contains("value") || !j["value"].is_number())
    throw ParseError(where + ": missing numeric \"value\"");

  int id;
  if (parent < 0) {
    id = tree.add_root(j["value"].get<Scalar>());
  } else {
    if (!j.contains("prob") || !j["prob"].is_number())
      throw ParseError(where + ": missing numeric \"prob\"");
    id = tree.add_child(parent, j["value"].get<Scalar>(),
                        j["prob"].get<Scalar>());
  }

  if (!j.contains("children") || !j["children"].is_array())
    throw ParseError(where + ": missing \"children\" array");
  const json& kids = j["children"];
  if (depth == tree.horizon) {
    if (!kids.empty())
      throw ParseError(where + ": children present below depth horizon");
  } else if (kids.empty()) {
    throw ParseError(where + ": leaf at depth " + std::to_string(depth) +
                     " < horizon");
  }
  for (size_t i = 0; i < kids.size(); ++i)
    parse_node(kids[i], where + ".children[" + std::to_string(i) + "]", tree,
               id, depth + 1);
}

}  // namespace

ScenarioTree tree_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("horizon") ||
      !j["horizon"].is_number_integer())
    throw ParseError("top level: missing integer \"horizon\"");
  if (!j.contains("root")) throw ParseError("top level: missing \"root\"");

  ScenarioTree tree;
  tree.horizon = j["horizon"].get<int>();
  if (tree.horizon < 1) throw ParseError("top level: horizon must be >= 1");
  parse_node(j["root"], "root", tree, -1, 0);

  const auto report = validate(tree);
  if (!report.empty()) throw ParseError("invalid tree: " + report.front());
  return tree;
}

ScenarioTree load_tree(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return tree_from_json_text(buf.str());
}

namespace {

json node_to_json(const ScenarioTree& tree, int u) {
  json j;
  j["value"] = tree.nodes[u].value;
  if (tree.nodes[u].parent >= 0) j["prob"] = tree.nodes[u].prob;
  j["children"] = json::array();
  for (int c : tree.nodes[u].children)
    j["children"].push_back(node_to_json(tree, c));
  return j;
}

}  // namespace

std::string tree_to_json_text(const ScenarioTree& tree) {
  json j;
  j["horizon"] = tree.horizon;
  j["root"] = node_to_json(tree, 0);
  return j.dump(2) + "\n";
}

void save_tree(const ScenarioTree& tree, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << tree_to_json_text(tree);
}

DiscreteDistribution load_distribution(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("atoms") || !j["atoms"].is_array())
    throw ParseError("distribution file: missing \"atoms\" array");
  DiscreteDistribution dist;
  for (size_t i = 0; i < j["atoms"].size(); ++i) {
    const json& a = j["atoms"][i];
    if (!a.is_object() || !a.contains("value") || !a.contains("weight"))
      throw ParseError("atoms[" + std::to_string(i) +
                       "]: expected {value, weight}");
    dist.atoms.push_back({a["value"].get<Scalar>(), a["weight"].get<Scalar>()});
  }
  const auto report = dist.validate();
  if (!report.empty()) throw ParseError("invalid distribution: " + report.front());
  return dist;
}

void save_distribution(const DiscreteDistribution& dist,
                       const std::string& path) {
  json j;
  j["atoms"] = json::array();
  for (const auto& a : dist.atoms)
    j["atoms"].push_back({{"value", a.value}, {"weight", a.weight}});
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace aw
