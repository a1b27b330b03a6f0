#include "netsir/cli.hpp"

int main(int argc, char** argv) { return netsir::run_cli(argc, argv); }
