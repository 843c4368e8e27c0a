#pragma once

#include "conetrap/config.hpp"
#include "conetrap/flux.hpp"
#include "conetrap/table.hpp"

namespace conetrap {

// Outcome of one CLI run: the output table plus the process exit code
// (0 = clean, 2 = completed with warnings; errors are thrown instead).
struct CommandResult {
  SweepTable table;
  int exit_code = 0;
};

// Execute the pipeline mapped to config.command and assemble its artifact.
CommandResult run_command(const RunConfig& config);

}  // namespace conetrap
