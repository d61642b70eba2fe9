#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cli {

enum ExitCode {
    kOk = 0,
    kFailure = 1,
    kParse = 2,
    kConfig = 3,
    kTimeout = 4,
    kNMax = 5,
};

// Entry point shared by the executable and the tests.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace cli
