#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ridgekit::cli {

/// Runs the ridgekit command line. argv[0] is the program name. Returns the
/// process exit code; reports go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ridgekit::cli
