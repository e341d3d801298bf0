#include <iostream>
#include <string>
#include <vector>

#include "kalman/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return kalman::cli::main(args, std::cout, std::cerr);
}
