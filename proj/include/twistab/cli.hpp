#pragma once

#include <string>
#include <vector>

#include "twistab/config.hpp"

namespace twistab {

inline constexpr const char* kVersion = "0.1.0";

const std::vector<std::string>& command_names();

struct RunOutcome {
  int exit_code = 0;
  std::string status = "ok";
  std::string error_name;
  std::string message;
  std::vector<std::string> files;  // relative to the output directory
};

/// Runs one command, writing its outputs plus manifest.json into `out_dir`
/// (created if needed). Never throws for toolkit errors; they are mapped to
/// exit codes and recorded in the manifest.
RunOutcome run_command(const std::string& command, const RunConfig& cfg, const std::string& out_dir);

/// Entry point behind the executable: --config, --out, --command, --threads.
int cli_main(int argc, char** argv);

}  // namespace twistab
