#include <iostream>

#include "qsocp_cli/commands.hpp"

int main(int argc, char** argv) { return qsocp::cli::run(argc, argv, std::cout, std::cerr); }
