#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace robustl1 {

/// Exit codes: 0 success, 1 usage error, 2 numerical failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

int cli_main(int argc, char** argv);

/// `args` excludes the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace robustl1
