#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace uroc {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitUndefinedMetric = 2;

// Entry point of the `uroc` tool; `args` excludes the program name. All
// output files are written only after every computation has succeeded.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace uroc
