#include <iostream>

#include "causal_lab/runner.hpp"

int main(int argc, char** argv) { return clab::cli_main(argc, argv, std::cout, std::cerr); }
