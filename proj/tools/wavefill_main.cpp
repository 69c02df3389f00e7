#include <iostream>

#include "wavefill/commands.hpp"

int main(int argc, char** argv) { return wavefill::run_cli(argc, argv, std::cout, std::cerr); }
