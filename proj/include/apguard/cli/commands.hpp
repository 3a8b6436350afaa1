#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace apguard::cli {

// Default output root when neither --out nor [run] out is given; each command
// then writes to $APGUARD_OUT/<command>.
inline constexpr const char* kOutputRootEnv = "APGUARD_OUT";
inline constexpr const char* kDefaultOutputRoot = "apguard_runs";

enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitUsage = 2 };

// Entry point shared by the executable and the tests. args excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace apguard::cli
