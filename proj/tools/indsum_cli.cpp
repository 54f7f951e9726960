#include <iostream>

#include "indsum/cli.hpp"

int main(int argc, char** argv) { return indsum::cli::run(argc, argv, std::cout, std::cerr); }
