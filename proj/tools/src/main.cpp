#include <iostream>

#include "everlast_cli/cli.hpp"

int main(int argc, char** argv) { return everlast::cli::run(argc, argv, std::cout, std::cerr); }
