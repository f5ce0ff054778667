#include <iostream>

#include "anisotex/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return anisotex::run_cli(args, std::cout, std::cerr);
}
