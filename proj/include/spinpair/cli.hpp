#pragma once

#include <string>
#include <vector>

namespace spinpair {

/// Run one CLI invocation (argv without the program name). Returns the
/// process exit status: 0 on success, 2 on usage errors, 1 on runtime
/// failures (with a single-line error on stderr). Declared output files are
/// written atomically.
int run_command(std::vector<std::string> args);

}  // namespace spinpair
