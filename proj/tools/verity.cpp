#include <iostream>

#include "verity/cli/cli.hpp"

int main(int argc, char** argv) {
  return verity::cli::run_cli(argc, argv, std::cin, std::cout, std::cerr);
}
