#pragma once

#include <json.hpp>

namespace skewnet::jobs {

struct RunResult {
  int status = 0;  // 0 ok, 2 validation, 3 numerical, 4 io
  nlohmann::json report;
  std::string error;
};

/// Executes one job described by a validated JSON config. Deterministic for a
/// fixed config and seed; writes the artifacts named in the config and returns
/// the residual report.
RunResult run(const nlohmann::json& config);

RunResult run_json_text(const std::string& config_text);

}  // namespace skewnet::jobs
