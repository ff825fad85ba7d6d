#include <iostream>

#include "specforge/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return specforge::run_cli(args, std::cout, std::cerr);
}
