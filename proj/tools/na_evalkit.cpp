#include "evalkit/cli.hpp"

#include <cstdlib>
#include <iostream>

#include <unistd.h>

int main(int argc, char** argv) {
  const char* color = std::getenv("NA_EVALKIT_COLOR");
  const evalkit::cli::Io io{
      std::cout, std::cerr,
      evalkit::cli::colorEnabled(color, ::isatty(STDOUT_FILENO) != 0),
      evalkit::cli::colorEnabled(color, ::isatty(STDERR_FILENO) != 0)};
  return evalkit::cli::run(argc, argv, io);
}
