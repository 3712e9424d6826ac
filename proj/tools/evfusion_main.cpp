#include <iostream>

#include "evfusion/harness/cli.hpp"

int main(int argc, char** argv) {
  return evfusion::harness::run_cli({argv, argv + argc}, std::cout, std::cerr);
}
