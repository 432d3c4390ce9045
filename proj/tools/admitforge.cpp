#include <iostream>

#include "admitforge/cli/commands.hpp"

int main(int argc, char** argv) { return admitforge::cli::run(argc, argv, std::cout, std::cerr); }
