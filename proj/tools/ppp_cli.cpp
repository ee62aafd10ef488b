#include "ppp/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return ppp::cli::run(argc, argv, std::cout, std::cerr);
}
