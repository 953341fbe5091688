#include <iostream>

#include "noma_lab/cli.hpp"

int main(int argc, char** argv) { return noma::cli_main(argc, argv, std::cout, std::cerr); }
