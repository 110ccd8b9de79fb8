#include <iostream>

#include "reqdialog/cli.hpp"

int main(int argc, char** argv) { return reqdialog::run_cli(argc, argv, std::cout, std::cerr); }
