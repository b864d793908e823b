#include <iostream>
#include <string>
#include <vector>

#include "gnsspred/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gnsspred::run_cli(args, std::cout, std::cerr);
}
