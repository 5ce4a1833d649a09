#include <iostream>

#include "sadim/cli.hpp"

int main(int argc, char** argv) { return sadim::run_cli(argc, argv, std::cout, std::cerr); }
