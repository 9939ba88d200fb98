#pragma once

#include <string>
#include <vector>

namespace ppca::cli {

/// Runs one CLI invocation (args exclude the program name).
/// Returns 0 on success, 1 on usage errors, 2 on numerical failures.
int run(const std::vector<std::string>& args);

}  // namespace ppca::cli
