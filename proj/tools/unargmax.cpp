#include <string>
#include <vector>

#include "unargmax/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return unargmax::cli::run(args);
}
