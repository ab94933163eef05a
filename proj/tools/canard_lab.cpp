#include <iostream>

#include "canard/cli.hpp"

int main(int argc, char** argv) { return canard::cli::run(argc, argv, std::cout, std::cerr); }
