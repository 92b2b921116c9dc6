#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "lognls/errors.hpp"

namespace lognls::harness {

using Json = nlohmann::json;

/// Exit status: 0 pass, 1 assertion failure, 2 config error, 3 numerical failure.
enum ExitCode : int { kPass = 0, kAssertionFailed = 1, kConfigError = 2, kNumericalFailure = 3 };

int exit_code_for(ErrorCode code);

struct Outcome {
  int exit_code = kPass;
  Json summary;  // also written to outputs.summary_json_path when set
  std::vector<std::string> artifacts;
};

/// Parses a JSON config file; ConfigError on unreadable or malformed input.
Json load_config(const std::string& path);

/// Runs one experiment, or a sweep when exactly one sweepable parameter is a
/// list. Errors are captured into the summary rather than thrown.
Outcome run(const Json& config);

/// Experiments accepted in the "experiment" key.
const std::vector<std::string>& experiment_names();

}  // namespace lognls::harness
