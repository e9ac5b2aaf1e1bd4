#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace relu {

// Exit codes: 0 success, 1 verification failure, 2 configuration error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace relu
