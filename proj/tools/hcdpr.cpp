#include <iostream>

#include "hcdpr/cli.hpp"

int main(int argc, char** argv) { return hcdpr::run_cli(argc, argv, std::cout, std::cerr); }
