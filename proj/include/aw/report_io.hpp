#pragma once

#include <string>

#include "aw/verify.hpp"

namespace aw {

/// JSON record {name, lhs, rhs, slack, constants{...}, ledger{b1, b2}}.
std::string report_to_json(const BoundReport& report);

void save_strategy(const Strategy& s, const std::string& path);
Strategy load_strategy(const std::string& path);

}  // namespace aw
