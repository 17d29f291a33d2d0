#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pktsched {

/// Exit codes: 0 success, 1 validation error or bad usage, 2 internal
/// invariant violation (including a failed structural check).
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitInvariant = 2;

/// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pktsched
