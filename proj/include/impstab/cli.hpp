#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace impstab {

// Exit codes: 0 STABLE, 1 UNSTABLE, 2 MARGINAL or INDETERMINATE, 3 usage or I/O error.
inline constexpr int exit_stable = 0;
inline constexpr int exit_unstable = 1;
inline constexpr int exit_undecided = 2;
inline constexpr int exit_usage = 3;

// args excludes the program name. Human summary goes to out, diagnostics and help to err.
[[nodiscard]] int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
[[nodiscard]] int run_cli(int argc, char** argv);

}  // namespace impstab
