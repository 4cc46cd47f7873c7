#ifndef FRACGRAD_CLI_COMMANDS_HPP
#define FRACGRAD_CLI_COMMANDS_HPP

#include <string>

namespace fracgrad::cli {

struct CliOptions {
  std::string command;      // selfcheck | solve | reduce | kernel | holder | compare-wsp
  std::string config_path;
  std::string out_dir = ".";
  bool force_oracle = false;  // waive the cost guard on quadrature oracles
};

// Parses the config, applies the FRACGRAD_SEED override, runs the command,
// and writes its artifacts under out_dir. Returns the process exit code for
// outcomes that are results rather than errors (selfcheck failure, solver
// non-convergence). Validation and numerical errors propagate as the usual
// exceptions; main maps them to exit codes 2 and 3.
int run_command(const CliOptions& opt);

}  // namespace fracgrad::cli

#endif
