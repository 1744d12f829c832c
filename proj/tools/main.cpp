#include <iostream>

#include "mouldcalc_cli.hpp"

int main(int argc, char **argv) { return mouldcalc::cli::run(argc, argv, std::cout, std::cerr); }
