#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sft::cli {

// Runs one command line (without the program name). Writes reports to out and
// diagnostics to err. Returns 0 on success, 1 on domain errors, 2 on
// malformed input or usage errors; every failure emits one
// "error[CODE]: message" line on err.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace sft::cli
