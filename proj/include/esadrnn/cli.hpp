#pragma once

namespace esadrnn {

// The command-line entry point: train, ensemble, forecast and evaluate
// subcommands. Returns the process exit code: 0 on success, 1 for usage
// and configuration problems, 2 for data problems, 3 for numeric
// failures during optimization.
int run_cli(int argc, const char* const* argv);

}  // namespace esadrnn
