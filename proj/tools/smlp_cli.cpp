#include <iostream>

#include "smlp/cli.hpp"

int main(int argc, char** argv) { return smlp::cli::run(argc, argv, std::cout, std::cerr); }
