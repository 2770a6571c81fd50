#include "sepbody/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return sepbody::cli::run(argc, argv, std::cout, std::cerr); }
