#include <iostream>
#include <string>
#include <vector>

#include "tiltbound/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return tiltbound::cli::run(args, std::cout, std::cerr);
}
