// Command-line front end: detect, assemble, solve, execute, diff, roundtrip.

#pragma once

#include <string>
#include <vector>

namespace cpat::cli {

struct CommandOutcome {
    /// 0 success; 1 the targeted pattern is violated / lost; 2 input or
    /// usage errors.
    int exit_code = 0;
    std::string out;
    std::string err;
};

/// Runs one subcommand. argv excludes the program name.
CommandOutcome run(const std::vector<std::string>& argv);

}  // namespace cpat::cli
