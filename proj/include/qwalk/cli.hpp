#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qwalk {

/// Exit codes of the command-line tool.
enum ExitCode : int { exit_ok = 0, exit_validation = 1, exit_runtime = 2 };

/// Runs the qwalk command line on `args` (program name excluded), writing
/// tables to `out` unless an output path is configured and diagnostics to `err`.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace qwalk
