#include "dsod/cli.hpp"

int main(int argc, char** argv) { return dsod::run_cli(argc, argv); }
