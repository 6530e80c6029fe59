#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace uplift {

// Command-line entry point, factored out of main() so tests can drive it
// in-process. Exit codes: 0 success, 1 usage error, 2 data error. Reports go
// to `out`, diagnostics to `err`; output is byte-deterministic for identical
// inputs and seed.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace uplift
