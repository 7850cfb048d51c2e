#include <iostream>

#include "epoa/cli.hpp"

int main(int argc, char** argv) {
  return epoa::run_cli(argc, argv, std::cout, std::cerr);
}
