#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace dictid::cli {

/// Entry point shared by the binary and the tests. args excludes the program
/// name. Exit codes: 0 success, 1 usage, 2 precondition/domain error (with a
/// machine-readable {"error", "detail"} JSON object on err).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dictid::cli
