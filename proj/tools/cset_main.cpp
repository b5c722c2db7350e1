#include <iostream>
#include <string>
#include <vector>

#include "cset/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cset::run(args, std::cout, std::cerr);
}
