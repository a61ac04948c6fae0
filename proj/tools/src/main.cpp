#include <iostream>

#include "l1qr/cli.hpp"

int main(int argc, char** argv) { return l1qr::cli::run(argc, argv, std::cout, std::cerr); }
