#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace netsir {

enum ExitCode { exit_ok = 0, exit_config = 2, exit_numerical = 3 };

// Dispatches one subcommand. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

struct SelfCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};
// Fast cross-layer invariant checks behind the `validate` subcommand.
std::vector<SelfCheck> run_self_checks();

}  // namespace netsir
