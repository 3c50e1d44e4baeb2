#include <iostream>

#include "rdregion/cli.hpp"

int main(int argc, char** argv) { return rdregion::run_cli(argc, argv, std::cout, std::cerr); }
