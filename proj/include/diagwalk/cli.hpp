#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace diagwalk::cli {

/// Parses and executes one command line (without the program name).
/// Returns the process exit code: 0 success, 1 computation error
/// (recurrent lattice, internal failure), 2 usage or domain error.
/// All regular output goes to `out`, one-line diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace diagwalk::cli
