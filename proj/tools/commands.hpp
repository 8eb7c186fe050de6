#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sagnacsr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumeric = 2;

inline constexpr const char* kToolVersion = "0.1.0";

/// Runs the command line `args` (program name excluded) and returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sagnacsr::cli
