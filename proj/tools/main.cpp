#include <iostream>

#include "mgt/cli.hpp"

int main(int argc, char** argv) { return mgt::cli::run(argc, argv, std::cout, std::cerr); }
