#pragma once

#include <string>
#include <vector>

namespace elicit::cli {

// Exit codes: 0 success, 1 verification failure, 2 usage or validation error.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);  // args without the program name

}  // namespace elicit::cli
