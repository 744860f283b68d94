#include "aw/report_io.hpp"

#include <fstream>

#include <json.hpp>

#include "aw/doob.hpp"

namespace aw {

using nlohmann::json;

std::string report_to_json(const BoundReport& report) {
  json j;
  j["name"] = report.name;
  j["lhs"] = report.lhs;
  j["rhs"] = report.rhs;
  j["slack"] = report.slack;
  j["constants"] = json::object();
  for (const auto& [key, value] : report.constants) j["constants"][key] = value;
  j["ledger"] = {{"b1", ConstantsLedger::b1},
                 {"b2", ConstantsLedger::b2},
                 {"quadratic_variation", "realized"}};
  return j.dump(2);
}

void save_strategy(const Strategy& s, const std::string& path) {
  json j;
  j["bound"] = s.bound;
  j["positions"] = s.position;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

Strategy load_strategy(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  Strategy s;
  s.bound = j.at("bound").get<Scalar>();
  s.position = j.at("positions").get<std::vector<Scalar>>();
  return s;
}

}  // namespace aw
