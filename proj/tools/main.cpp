#include <iostream>
#include <string>
#include <vector>

#include "fmds_cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return fmds::cli::run_cli(args, std::cout, std::cerr);
}
