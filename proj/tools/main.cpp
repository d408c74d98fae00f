#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return posctl::cli::run(argc, argv, std::cout, std::cerr); }
