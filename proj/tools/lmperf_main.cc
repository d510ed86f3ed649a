#include <iostream>

#include "lmperf/cli.h"

int main(int argc, char** argv) {
  return lmperf::run_cli(argc, argv, std::cout, std::cerr);
}
