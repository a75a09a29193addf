#include <vector>

#include "spinpair/cli.hpp"

int main(int argc, char** argv) {
  return spinpair::run_command({argv + 1, argv + argc});
}
