#include "qbm_cli/commands.hpp"

#include <iostream>

int main(int argc, char** argv) { return qbm::cli::run(argc, argv, std::cout, std::cerr); }
