#include <iostream>
#include <string>
#include <vector>

#include "stereorect/cli.h"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return stereorect::run_cli(args, std::cout, std::cerr);
}
