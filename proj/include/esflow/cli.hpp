#pragma once
#include <ostream>
#include <string>
#include <vector>

namespace esflow::cli {

// full command driver used by the escli binary and the tests;
// returns the process exit code:
// 0 pass, 1 check failure, 2 usage or config error, 3 numerical failure
int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err);

}  // namespace esflow::cli
