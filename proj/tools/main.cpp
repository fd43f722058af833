#include "orosoar/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return orosoar::run_cli(argc, argv, std::cout, std::cerr); }
