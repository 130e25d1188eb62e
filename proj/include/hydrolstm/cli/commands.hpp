#pragma once

#include <string>
#include <vector>

namespace hydrolstm::cli {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitDiverged = 3;

/// Entry point of the `hydrolstm` tool: synth, train, evaluate, tsoi, cells, inspect-cell, construct.
int run_cli(int argc, char** argv);

/// Same, from arguments that exclude the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace hydrolstm::cli
