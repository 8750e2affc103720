#include <iostream>

#include "trajsplit/cli.hpp"

int main(int argc, char** argv) { return trajsplit::cli::run(argc, argv, std::cout, std::cerr); }
