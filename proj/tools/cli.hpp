#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "raylab/error.hpp"

namespace raylab::cli {

// Process exit code for a library error kind.
int exit_code(ErrorKind kind);

// Runs `raylab <args...>` (args exclude the program name). Diagnostics go to
// err as a single "error: <Kind>: message" line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace raylab::cli
