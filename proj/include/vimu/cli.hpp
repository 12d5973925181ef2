#pragma once

#include <string>
#include <vector>

namespace vimu::cli {

/// Parse one subcommand invocation and execute it. Exit codes: 0 success,
/// 2 usage, 3 parse, 4 validation, 5 I/O. Output files are written to a
/// temporary path and renamed on success, so failures leave no partial
/// output behind.
int run(const std::vector<std::string>& args);

/// main() adapter; skips argv[0].
int run(int argc, const char* const* argv);

}  // namespace vimu::cli
