#include "gmcr/commands.hpp"

#include <iostream>

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gmcr::run_cli(args, std::cout, std::cerr);
}
