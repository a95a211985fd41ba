#include <iostream>

#include "fman/cli.hpp"

int main(int argc, char** argv) {
  return fman::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
