#include <iostream>

#include "specshape/cli.hpp"

int main(int argc, char** argv) {
    return specshape::cli::run(argc, argv, std::cout, std::cerr);
}
