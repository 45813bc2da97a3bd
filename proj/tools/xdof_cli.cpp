#include <iostream>

#include "xdof/cli.hpp"

int main(int argc, char** argv) {
  return xdof::cli::main(argc, argv, std::cout, std::cerr);
}
