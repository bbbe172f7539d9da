#include "soccerseq/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return soccerseq::cli::run(argc, argv, std::cout, std::cerr); }
