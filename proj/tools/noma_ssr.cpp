#include <iostream>

#include "noma_cli.hpp"

int main(int argc, char** argv) { return nomassr::cli::run(argc, argv, std::cout, std::cerr); }
