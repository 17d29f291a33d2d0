#include <iostream>
#include <string>
#include <vector>

#include "pktsched/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return pktsched::run_cli(args, std::cout, std::cerr);
}
