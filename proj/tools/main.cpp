#include <iostream>

#include "edgesim/cli.hpp"

int main(int argc, char** argv) { return edgesim::run_cli(argc, argv, std::cout, std::cerr); }
