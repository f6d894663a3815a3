#include <iostream>

#include "cmx/cli/commands.hpp"

int main(int argc, char** argv) { return cmx::cli::main_entry(argc, argv, std::cout, std::cerr); }
