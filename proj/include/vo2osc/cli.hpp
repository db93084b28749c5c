#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vo2osc {

enum ExitCode { ExitOk = 0, ExitFailure = 1, ExitConfig = 2, ExitSolver = 3 };

/// Parses "start:stop:count" into `count` evenly spaced values.
std::vector<double> parse_range(const std::string& text);

/// Entry point of the command-line front end; returns the process exit code.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vo2osc
