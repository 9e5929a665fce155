#include <iostream>

#include "exlab/cli.hpp"

int main(int argc, char** argv) { return exlab::run_subcommand(argc, argv, std::cout, std::cerr); }
