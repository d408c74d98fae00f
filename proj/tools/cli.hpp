#pragma once

#include <ostream>

namespace posctl::cli {

// Runs one command line. JSON goes to `out` (or --out), diagnostics to `err`.
// Exit codes: 0 success, 1 domain violation or infeasible, 2 usage or parse error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace posctl::cli
