#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hyperswitch::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNegative = 2;  // well-formed but infeasible, unstable or outside the class

/// Runs the command line front-end; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hyperswitch::cli
