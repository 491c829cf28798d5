#include <iostream>

#include "rgrk/cli.hpp"

int main(int argc, char** argv) { return rgrk::cli::run(argc, argv, std::cout, std::cerr); }
