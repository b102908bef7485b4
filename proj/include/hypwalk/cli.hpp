#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hypwalk {

// Exit codes: 0 all flags pass, 1 some flag failed or a computation failed,
// 2 usage, config or precondition error.
inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hypwalk
