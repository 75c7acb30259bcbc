#include "casework/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return casework::run_cli(argc, argv, std::cout, std::cerr); }
