#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mars::cli {

/// Runs one `mars` command line (args[0] is the program name) and returns
/// the process exit code: 0 ok, 2 bad input or usage, 3 degenerate labels,
/// 4 feature mismatch, 5 unreadable model.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Worker thread cap from MARS_THREADS (default 1).
std::size_t thread_cap();

}  // namespace mars::cli
