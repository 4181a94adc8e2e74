// cli.hpp - Command-line entry point.

#pragma once

#include <string>
#include <vector>

namespace mathverify {

// Subcommands: verify, eval, probe, probe run, monitor, serve.
// Exit codes: 0 success, 1 runtime failure, 2 usage or config error.
int cli_main(const std::vector<std::string>& args);
int cli_main(int argc, char** argv);

}  // namespace mathverify
