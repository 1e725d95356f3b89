#include <iostream>
#include <string>
#include <vector>

#include "pforge/app/commands.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return pforge::app::run_cli(args, std::cout, std::cerr);
}
