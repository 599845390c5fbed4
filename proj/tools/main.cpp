#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return epimon::cli::run(argc, argv, std::cout, std::cerr); }
