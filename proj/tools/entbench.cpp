#include <iostream>

#include "entbench/cli.hpp"

int main(int argc, char** argv) { return entbench::cli::run_cli(argc, argv, std::cout, std::cerr); }
