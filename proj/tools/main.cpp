#include <iostream>

#include "cli/cli.hpp"

int main(int argc, char** argv) { return nuhlab::cli::dispatch(argc, argv, std::cout, std::cerr); }
