#include <iostream>

#include "bmrep_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return bmrep::cli::run(args, std::cout, std::cerr);
}
