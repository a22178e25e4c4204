#include <iostream>

#include "stripes/cli.hpp"

int main(int argc, char** argv) {
    return stripes::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
