#include <doctest.h>

#include <cstdio>

#include "aw/generators.hpp"
#include "aw/tree.hpp"
#include "aw/tree_io.hpp"

using namespace aw;

namespace {

// 1-step tree: root 0, children +1/-1 each with probability 1/2.
ScenarioTree one_step_pm1() {
  ScenarioTree t;
  t.horizon = 1;
  t.add_root(0.0);
  t.add_child(0, 1.0, 0.5);
  t.add_child(0, -1.0, 0.5);
  return t;
}

// Two-period model P_n: first coordinate +-1/n, then {1,0} / {0,-1}.
ScenarioTree remark_tree(int n) {
  ScenarioTree t;
  t.horizon = 2;
  t.add_root(0.0);
  const int up = t.add_child(0, 1.0 / n, 0.5);
  const int dn = t.add_child(0, -1.0 / n, 0.5);
  t.add_child(up, 1.0, 0.5);
  t.add_child(up, 0.0, 0.5);
  t.add_child(dn, 0.0, 0.5);
  t.add_child(dn, -1.0, 0.5);
  return t;
}

}  // namespace

TEST_CASE("validate accepts a correct binomial tree") {
  ScenarioTree t;
  t.horizon = 2;
  t.add_root(100.0);
  const int u = t.add_child(0, 110.0, 0.5);
  const int d = t.add_child(0, 90.0, 0.5);
  t.add_child(u, 120.0, 0.5);
  t.add_child(u, 100.0, 0.5);
  t.add_child(d, 100.0, 0.5);
  t.add_child(d, 80.0, 0.5);
  CHECK(validate(t).empty());
}

TEST_CASE("validate flags probability sums and leaf depth") {
  ScenarioTree t;
  t.horizon = 1;
  t.add_root(0.0);
  t.add_child(0, 1.0, 0.5);
  t.add_child(0, -1.0, 0.6);
  const auto report = validate(t);
  REQUIRE(report.size() == 1);
  CHECK(report[0].find("probability sum") != std::string::npos);

  ScenarioTree s;
  s.horizon = 2;
  s.add_root(0.0);
  s.add_child(0, 1.0, 1.0);  // leaf at time 1 < horizon 2
  const auto report2 = validate(s);
  REQUIRE(!report2.empty());
  CHECK(report2[0].find("leaf") != std::string::npos);
}

TEST_CASE("to_path_law basics") {
  const PathLaw law = to_path_law(one_step_pm1());
  REQUIRE(law.path_count() == 2);
  CHECK(law.values(0, 0) == 0.0);
  CHECK(law.values(0, 1) == 1.0);
  CHECK(law.values(1, 1) == -1.0);
  CHECK(law.probs[0] == 0.5);

  ScenarioTree chain;
  chain.horizon = 2;
  chain.add_root(0.0);
  chain.add_child(chain.add_child(0, 1.0, 1.0), 2.0, 1.0);
  const PathLaw single = to_path_law(chain);
  REQUIRE(single.path_count() == 1);
  CHECK(single.values(0, 2) == 2.0);
  CHECK(single.probs[0] == 1.0);
}

TEST_CASE("path law of the two-period kinked model, n = 1") {
  const PathLaw law = to_path_law(remark_tree(1));
  REQUIRE(law.path_count() == 4);
  const double expected[4][3] = {
      {0, 1, 1}, {0, 1, 0}, {0, -1, 0}, {0, -1, -1}};
  for (Index i = 0; i < 4; ++i) {
    CHECK(law.probs[i] == 0.25);
    for (int t = 0; t <= 2; ++t) CHECK(law.values(i, t) == expected[i][t]);
  }
}

TEST_CASE("path mass sums to one on random trees") {
  Rng rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    RandomTreeSpec spec;
    const ScenarioTree t = random_tree(rng, spec);
    REQUIRE(validate(t).empty());
    CHECK(to_path_law(t).probs.sum() == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("canonicalization is idempotent and preserves the path law") {
  Rng rng(11);
  RandomTreeSpec spec;
  for (int rep = 0; rep < 10; ++rep) {
    const ScenarioTree t = random_tree(rng, spec);
    const ScenarioTree c1 = canonicalize(t);
    const ScenarioTree c2 = canonicalize(c1);
    CHECK(structurally_equal(c1, c2, 1e-14));
    CHECK(same_path_law(t, c1, 1e-12, 1e-12));
  }
}

TEST_CASE("canonicalization merges equal-value siblings") {
  ScenarioTree t;
  t.horizon = 2;
  t.add_root(0.0);
  const int a = t.add_child(0, 1.0, 0.25);
  const int b = t.add_child(0, 1.0, 0.25);
  const int c = t.add_child(0, -1.0, 0.5);
  t.add_child(a, 2.0, 1.0);
  t.add_child(b, 0.0, 1.0);
  t.add_child(c, -1.0, 1.0);
  const ScenarioTree canon = canonicalize(t);
  // Root now has two children (-1 and merged +1).
  CHECK(canon.nodes[0].children.size() == 2);
  CHECK(same_path_law(t, canon, 1e-12, 1e-12));
}

TEST_CASE("save and load round-trip") {
  Rng rng(3);
  RandomTreeSpec spec;
  const ScenarioTree t = random_tree(rng, spec);
  const std::string path = "roundtrip_tree.json";
  save_tree(t, path);
  const ScenarioTree back = load_tree(path);
  CHECK(structurally_equal(t, back, 0.0));
  std::remove(path.c_str());
}

TEST_CASE("malformed files raise parse errors naming the node") {
  CHECK_THROWS_AS(tree_from_json_text("{"), ParseError);
  CHECK_THROWS_AS(tree_from_json_text(R"({"horizon": 1})"), ParseError);
  // Missing prob on a child.
  const char* missing_prob = R"({"horizon": 1, "root": {"value": 0,
      "children": [{"value": 1, "children": []}]}})";
  try {
    tree_from_json_text(missing_prob);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("root.children[0]") != std::string::npos);
  }
  // Children below the declared horizon.
  const char* too_deep = R"({"horizon": 2, "root": {"value": 0,
      "children": [{"prob": 1.0, "value": 1, "children": []}]}})";
  CHECK_THROWS_AS(tree_from_json_text(too_deep), ParseError);
}

TEST_CASE("probability sum at the tolerance boundary is accepted") {
  const char* text = R"({"horizon": 1, "root": {"value": 0, "children": [
      {"prob": 0.5, "value": 1, "children": []},
      {"prob": 0.499999999999, "value": -1, "children": []}]}})";
  const ScenarioTree t = tree_from_json_text(text);
  CHECK(validate(t).empty());

  // Clearly off sums are rejected.
  const char* bad = R"({"horizon": 1, "root": {"value": 0, "children": [
      {"prob": 0.5, "value": 1, "children": []},
      {"prob": 0.6, "value": -1, "children": []}]}})";
  CHECK_THROWS_AS(tree_from_json_text(bad), ParseError);
}

TEST_CASE("tree_from_paths reconstructs the prefix tree") {
  const std::vector<std::vector<double>> paths = {
      {0, 1, 1}, {0, 1, 0}, {0, -1, 0}, {0, -1, -1}};
  const std::vector<double> probs = {0.25, 0.25, 0.25, 0.25};
  const ScenarioTree t = tree_from_paths(paths, probs);
  CHECK(validate(t).empty());
  CHECK(same_path_law(t, remark_tree(1)));
}
