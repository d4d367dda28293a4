#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gmcr {

/// Exit statuses of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRegistration = 2;

/// Runs the `gmcr` command line; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gmcr
