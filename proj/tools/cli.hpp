#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace slroute::cli {

/// Exit codes: 0 executed / success, 1 usage error, 2 not executed or
/// gateway failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNotExecuted = 2;

/// Runs one command line (without the program name).
///
/// Settings resolve in increasing precedence: built-in defaults, the config
/// file (--config, else $SLROUTE_CONFIG), SLROUTE_* environment variables,
/// command-line flags.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace slroute::cli
