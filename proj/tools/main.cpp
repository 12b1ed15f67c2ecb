#include <iostream>

#include "ftm/cli.hpp"

int main(int argc, char** argv) { return ftm::cli::run(argc, argv, std::cout, std::cerr); }
