#include <vector>

#include "aqpipe/cli.hpp"

int main(int argc, char** argv) {
  return aqpipe::cli::run_cli({argv, argv + argc});
}
