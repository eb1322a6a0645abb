#include <iostream>

#include "fmmv/cli.hpp"

int main(int argc, char** argv) {
  return fmmv::run_cli(argc, argv, std::cout, std::cerr);
}
