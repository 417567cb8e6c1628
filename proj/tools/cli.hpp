#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace stabreg::cli {

/// Entry point of the `stabreg` tool. Exit codes: 0 success, 1 a check or
/// game failed, 2 bad input (arguments, config, trace).
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stabreg::cli
