#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lcga::cli {

enum ExitCode : int {
    ok = 0,
    failure = 1,
    data_error = 2,
    fit_degenerate = 3,
    bad_flags = 4,
};

// Entry point shared by the executable and the tests. argv[0] is the program
// name. Normal output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lcga::cli
