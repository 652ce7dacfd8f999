#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "causal_lab/config.hpp"

namespace clab {

enum ExitCode : int { kExitPass = 0, kExitError = 1, kExitVerdictFail = 2 };

/// Subcommand names in the order `--help` lists them.
[[nodiscard]] const std::vector<std::string>& subcommands();

/// Runs one subcommand and writes its artifacts under cfg.out. `out` gets the
/// single verdict line, `err` gets progress. Exceptions propagate.
int run_subcommand(const std::string& name, const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Whole command line: argument parsing, config loading, error to exit-code mapping.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace clab
