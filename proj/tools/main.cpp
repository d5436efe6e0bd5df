#include <iostream>

#include "cvo/cli.hpp"

int main(int argc, char** argv) {
  return cvo::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
