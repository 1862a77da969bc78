#include "spinfid/cli.hpp"

#include <iostream>

int main(int argc, char **argv) { return spinfid::cli::run(argc, argv, std::cout, std::cerr); }
