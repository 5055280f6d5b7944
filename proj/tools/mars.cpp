#include <iostream>
#include <string>
#include <vector>

#include "mars/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return mars::cli::run(args, std::cout, std::cerr);
}
