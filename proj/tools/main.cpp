#include "mkmmd/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return mkmmd::cli::run(argc, argv, std::cout, std::cerr); }
