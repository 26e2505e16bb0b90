#include "sospec/cli.hpp"

int main(int argc, char** argv) { return sospec::cli::main_with_args(argc, argv); }
