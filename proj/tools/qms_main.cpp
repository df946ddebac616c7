#include <iostream>
#include <string>
#include <vector>

#include "qms/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return qms::run_cli(args, std::cout, std::cerr);
}
