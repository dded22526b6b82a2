#include <iostream>

#include "qcmass/cli.hpp"

int main(int argc, char** argv) { return qcmass::cli::run(argc, argv, std::cout, std::cerr); }
