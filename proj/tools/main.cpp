#include "wfdelay_cli/cli.hpp"

int main(int argc, char** argv) { return wfdelay::cli::main(argc, argv); }
