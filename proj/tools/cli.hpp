#pragma once

#include <iosfwd>

namespace adaptive_mls::cli {

/// Exit codes: 0 success, 1 computation or selftest failure, 2 usage or input error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Entry point behind the `adaptive_mls` executable; all output goes to the given streams
/// except files named by --out.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace adaptive_mls::cli
