#pragma once

// The job runner behind the CLI and the shared-library entry point: each
// command takes a JSON config, produces a JSON result
//   {"command", "config", "report", "artifacts": {filename: content}}
// and an exit code. The config echo plus fixed seeds make identical inputs
// produce byte-identical output (jsonio keeps keys sorted).

#include <string>
#include <vector>

#include "jsonio.hpp"

namespace vl::jobs {

// Exit codes: pass / assertion failure / unusable config / nothing failed
// outright but truncation contamination blocked every measurement.
inline constexpr int kPass = 0;
inline constexpr int kFail = 1;
inline constexpr int kConfigError = 2;
inline constexpr int kContaminated = 3;

const std::vector<std::string>& commands();

int run(const std::string& command, const jsonio::json& config, jsonio::json& out);

}  // namespace vl::jobs
