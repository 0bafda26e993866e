#include "sslse/cli/commands.hpp"

int main(int argc, char** argv) { return sslse::cli::run_cli(argc, argv); }
