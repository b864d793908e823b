#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gnsspred {

/// Exit codes: 0 success, 1 runtime failure, 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Environment variable supplying the default cache directory.
inline constexpr const char* kCacheDirEnv = "GNSSPRED_CACHE_DIR";

/// Runs `gnsspred <args...>`; args exclude the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gnsspred
