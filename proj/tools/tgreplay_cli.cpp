#include <iostream>

#include "tgreplay/cli.hpp"

int main(int argc, char** argv) { return tgreplay::cli::run(argc, argv, std::cout, std::cerr); }
