#include <iostream>
#include <string>
#include <vector>

#include "taxeval/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return taxeval::run_cli(args, std::cout, std::cerr);
}
