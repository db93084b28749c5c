#include <iostream>
#include <string>
#include <vector>

#include "vo2osc/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return vo2osc::cli_main(args, std::cout, std::cerr);
}
