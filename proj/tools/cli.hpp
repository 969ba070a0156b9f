#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qbnet::cli {

enum ExitCode : int {
    success = 0,
    io_failure = 1,
    usage_error = 2,
    numeric_failure = 3,
};

/// Runs the command line `args` (program name excluded). Results go to
/// `out`, diagnostics to `err`.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qbnet::cli
