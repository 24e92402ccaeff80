// Command-line front end: experiment configuration, orchestration, and
// deterministic result emission.
//
// Outputs are CSV tables (or binary field snapshots) that embed the tool
// version, the command, and every consumed option except the worker count,
// which must not influence output bytes. Wall-clock timing goes to stderr so
// repeated runs stay byte-identical.

#pragma once

namespace dsod {

// Parses and runs one command line. Returns the process exit code: 0 success,
// 2 non-convergence, 3 invalid mathematical request, 64 usage error, 130
// interrupted.
int run_cli(int argc, const char* const* argv);

}  // namespace dsod
