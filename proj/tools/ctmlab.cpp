#include <iostream>

#include "ctm/cli.hpp"

int main(int argc, char** argv) { return ctm::cli::run(argc, argv, std::cout, std::cerr); }
