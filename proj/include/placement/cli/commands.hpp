#pragma once

// `placement` subcommands: validate, estimate, demo-paper, simulate, serve.
// Exit codes: 0 success, 1 domain failure, 2 usage or I/O error.

#include <iosfwd>
#include <string>
#include <vector>

namespace placement::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace placement::cli
