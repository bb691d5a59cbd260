#include <iostream>

#include "gmt/cli/pipeline.hpp"

int main(int argc, char** argv) { return gmt::cli::run_cli(argc, argv, std::cout, std::cerr); }
