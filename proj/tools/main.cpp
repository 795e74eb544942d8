#include <string>
#include <vector>

#include "meanshift/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return meanshift::run_cli(args);
}
