#include <iostream>

#include "morreymax/cli.hpp"

int main(int argc, char** argv) { return morreymax::cli::run(argc, argv, std::cout, std::cerr); }
