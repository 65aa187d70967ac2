#include <iostream>

#include "dcsharp/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dcsharp::run_cli(args, std::cout);
}
