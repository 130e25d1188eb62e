#include "hydrolstm/cli/commands.hpp"

int main(int argc, char** argv) { return hydrolstm::cli::run_cli(argc, argv); }
