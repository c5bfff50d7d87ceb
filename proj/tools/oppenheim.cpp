#include "oppenheim/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return oppenheim::cli::run(argc, argv, std::cout, std::cerr); }
