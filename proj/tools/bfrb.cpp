#include "bfrb/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return bfrb::cli::run(argc, argv, std::cout, std::cerr);
}
