#include <iostream>

#include "vvcm/cli.hpp"

int main(int argc, char** argv) { return vvcm::cli::run(argc, argv, std::cout, std::cerr); }
