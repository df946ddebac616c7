#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qms {

/// Runs the `qms` command line. args[0] is the program name.
/// Returns 0 on success / all checks passing, 1 when a checked property fails, 2 on usage or parse errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qms
