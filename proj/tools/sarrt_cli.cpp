#include <iostream>

#include "sarrt_cli.hpp"

int main(int argc, char** argv) { return sarrt::cli::run(argc, argv, std::cout, std::cerr); }
