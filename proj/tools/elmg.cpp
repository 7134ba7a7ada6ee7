#include <iostream>

#include "elmg_cli.hpp"

int main(int argc, char** argv) { return elmg::cli::run(argc, argv, std::cout, std::cerr); }
