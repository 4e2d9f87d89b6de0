#include <iostream>
#include <string>
#include <vector>

#include "mrpt/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mrpt::cli_main(args, std::cout, std::cerr);
}
