#pragma once

#include <iosfwd>

namespace qmtbdd::cli {

/// Exit codes of the qmtbdd tool.
enum ExitCode : int {
    kOk = 0,
    kUsage = 2,        // bad flags, unreadable files, malformed circuits
    kNumericRange = 3, // overflow/underflow in the chosen precision
    kInternal = 4,
};

/// Environment variable capping the sweep worker count.
inline constexpr const char* kWorkersEnv = "QMTBDD_WORKERS";

/// Runs one command line. Results go to out, diagnostics to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace qmtbdd::cli
