#pragma once

#include <string>
#include <vector>

namespace txnforge::cli {

/// Runs the command line in-process and returns the process exit code:
/// 0 success, 2 usage/config/parameter/data errors, 3 IO failures.
/// `args` excludes the program name. Never throws and never calls exit,
/// so tests can drive full pipelines without spawning processes.
int run(std::vector<std::string> args);

} // namespace txnforge::cli
