#include <iostream>

#include "gdeconv_cli/cli.hpp"

int main(int argc, char** argv) { return gdeconv::cli::run(argc, argv, std::cout, std::cerr); }
