#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dbkit {

// Command dispatch; exit codes: 0 success, 1 input error, 2 analysis obstruction.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dbkit
