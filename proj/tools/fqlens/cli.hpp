// =============================================================================
// cli.hpp - Argument parsing and exit-code mapping for the fqlens tool.
//
//   fqlens [global flags] <convert|compute|ovr|loo|simulate> [args]
//
// Exit codes: 0 success, 2 configuration error, 3 parse/format error,
// 4 undefined statistic, 5 extinction, 1 anything else. FQLENS_LOG selects
// diagnostics verbosity (trace, debug, info, warn, error, off; default warn).
// =============================================================================
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fqlens::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfig = 2,
    kExitParse = 3,
    kExitUndefined = 4,
    kExitExtinct = 5,
};

/// `args` excludes the program name. Diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fqlens::cli
