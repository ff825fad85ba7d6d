#pragma once

// Command-line front end: check, serve, generate, scenario, fmt.

#include <iosfwd>
#include <string>
#include <vector>

namespace specforge {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int violated = 1;
inline constexpr int bound_exhausted = 2;
inline constexpr int usage = 64;
inline constexpr int bad_model = 65;
inline constexpr int io = 66;
inline constexpr int port_in_use = 69;
inline constexpr int cannot_create = 73;
}  // namespace exit_code

/// args excludes the program name. Reports go to out, diagnostics to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace specforge
