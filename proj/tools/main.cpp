#include <iostream>
#include <vector>

#include "mfg/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mfg::cli::run(args, std::cout, std::cerr);
}
