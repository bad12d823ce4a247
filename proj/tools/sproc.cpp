#include <iostream>
#include <string>
#include <vector>

#include "sproc/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return sproc::run_cli(args, std::cout, std::cerr);
}
