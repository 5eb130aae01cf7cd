#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "glogit/config.hpp"

namespace glogit {

struct CommandOutput {
  std::vector<std::string> files;
  nlohmann::json summary;
};

CommandOutput cmd_fit(const RunConfig& cfg);
CommandOutput cmd_select(const RunConfig& cfg);
CommandOutput cmd_cov(const RunConfig& cfg);
CommandOutput cmd_detect(const RunConfig& cfg);
CommandOutput cmd_pipeline(const RunConfig& cfg);
CommandOutput cmd_simulate(const RunConfig& cfg);

CommandOutput run_command(const std::string& command, const RunConfig& cfg);

// Process exit code for an exception escaping a command.
int exit_code_for(const std::exception& e);

}  // namespace glogit
