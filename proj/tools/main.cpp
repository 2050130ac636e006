#include "riskchain/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return riskchain::run(argc, argv, std::cout, std::cerr);
}
