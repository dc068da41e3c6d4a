#include <iostream>

#include "airboard/cli.hpp"

int main(int argc, char** argv) { return airboard::cli::run(argc, argv, std::cout, std::cerr); }
