#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stratsel::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kComputeError = 2 };

// Parses argv (including the program name) and runs one subcommand.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "lo:hi:count[:log]" into grid values. Throws InvalidConfig.
std::vector<double> parse_grid(const std::string& text);

}  // namespace stratsel::cli
