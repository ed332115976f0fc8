#include <iostream>
#include <string>
#include <vector>

#include "pseudofree/cli.hpp"

int main(int argc, char** argv) {
  pseudofree::RunConfig config;
  try {
    config = pseudofree::load_config_from_env();
  } catch (const pseudofree::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return pseudofree::kExitUsage;
  }
  std::vector<std::string> args(argv + 1, argv + argc);
  return pseudofree::run_command(args, config, std::cout, std::cerr);
}
