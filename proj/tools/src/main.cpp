#include <iostream>

#include "bailout_cli/cli.hpp"

int main(int argc, char** argv) {
  const auto parsed = bailout::cli::parse_command_line(argc, argv, std::cout, std::cerr);
  if (!parsed.spec) return parsed.exit_code;
  return bailout::cli::run(*parsed.spec, std::cout, std::cerr);
}
