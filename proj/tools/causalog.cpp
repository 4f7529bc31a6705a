#include <iostream>

#include "causalog/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return causalog::run_cli(args, std::cout, std::cerr);
}
