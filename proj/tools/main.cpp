#include <string>
#include <vector>

#include "hoferlab/scenarios.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hoferlab::run_cli(args);
}
