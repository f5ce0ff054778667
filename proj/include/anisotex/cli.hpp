#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace anisotex {

// Entry point of the command-line tool. Returns the process exit status:
// 0 success, 1 internal or numerical failure, 2 usage or domain error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace anisotex
