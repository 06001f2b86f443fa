#include <iostream>

#include "cli_app.hpp"

int main(int argc, char** argv) {
    return spatsign::cli::cli_main(argc, argv, std::cout, std::cerr);
}
