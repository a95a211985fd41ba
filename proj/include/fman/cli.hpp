#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fman::cli {

inline constexpr const char* kToolName = "fman";
inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { pass = 0, check_failure = 1, input_error = 2 };

/// Runs one command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fman::cli
