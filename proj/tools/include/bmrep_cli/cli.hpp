#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bmrep::cli {

// Runs one command line. Exit codes: 0 success, 1 numerical failure,
// 2 usage error (including malformed expressions). Failures print one
// machine-readable line on err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bmrep::cli
