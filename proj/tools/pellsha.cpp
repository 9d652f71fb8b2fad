#include <iostream>

#include "pellsha/cli.hpp"

int main(int argc, char** argv) { return pellsha::cli::run(argc, argv, std::cout, std::cerr); }
