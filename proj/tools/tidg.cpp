#include <iostream>

#include "tidg/cli.hpp"

int main(int argc, char** argv) { return tidg::cli::run_cli(argc, argv, std::cout, std::cerr); }
