#include <iostream>

#include "nsdamp/commands.hpp"

int main(int argc, char** argv) { return nsdamp::cli::run_cli(argc, argv, std::cout, std::cerr); }
