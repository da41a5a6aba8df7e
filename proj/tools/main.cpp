#include <iostream>

#include "wearssl/cli/run.hpp"

int main(int argc, char** argv) { return wearssl::cli::run(argc, argv, std::cout, std::cerr); }
