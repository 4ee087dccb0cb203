#include <vector>

#include "lbm/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return lbm::cli::run(args);
}
