#include <iostream>
#include <string>
#include <vector>

#include "jetext/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return jetext::cli::run(args, std::cout, std::cerr);
}
