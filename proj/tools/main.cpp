#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("ecl");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* lvl = std::getenv("ECL_LOG_LEVEL")) {
    spdlog::set_level(spdlog::level::from_str(lvl));
  }
  std::vector<std::string> args(argv + 1, argv + argc);
  return ecl::cli::run(args, std::cout, std::cerr);
}
