// cli.hpp

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace taxiq::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_validation = 2;
inline constexpr int exit_numerical = 3;
inline constexpr int exit_usage = 4;

/// Runs one command. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace taxiq::cli
