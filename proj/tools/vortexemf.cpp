#include <iostream>

#include "vortexemf/cli.hpp"

int main(int argc, char** argv) { return vemf::cli::main(argc, argv, std::cout, std::cerr); }
