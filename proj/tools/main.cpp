#include <iostream>

#include "keyguess/cli.hpp"

int main(int argc, char** argv) { return keyguess::run_cli(argc, argv, std::cout, std::cerr); }
