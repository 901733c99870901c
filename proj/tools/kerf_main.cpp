#include <iostream>

#include "kerf/cli.hpp"

int main(int argc, char** argv) { return kerf::cli::run(argc, argv, std::cout, std::cerr); }
