#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace epimon::validation {

struct CheckResult {
  std::string suite;
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Property suites over the library, driven by seeded generators. Every
/// suite runs on its own sub-seed, so results do not depend on suite order.
std::vector<CheckResult> run_all(std::uint64_t seed);

nlohmann::json to_json(const std::vector<CheckResult>& results, std::uint64_t seed);

}  // namespace epimon::validation
