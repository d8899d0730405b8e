#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace everlast::testing {

// tests/fixtures/oracle_values.json, produced by tools/oracle_values.py.
inline const nlohmann::json& oracle() {
  static const nlohmann::json j = [] {
    std::ifstream in(std::string(EVERLAST_FIXTURE_DIR) + "/oracle_values.json");
    if (!in) throw std::runtime_error("missing oracle_values.json");
    return nlohmann::json::parse(in);
  }();
  return j;
}

inline nlohmann::json fixture(const std::string& name) {
  std::ifstream in(std::string(EVERLAST_FIXTURE_DIR) + "/" + name);
  if (!in) throw std::runtime_error("missing fixture " + name);
  return nlohmann::json::parse(in);
}

}  // namespace everlast::testing
