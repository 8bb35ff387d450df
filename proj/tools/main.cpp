#include <iostream>
#include <string>
#include <vector>

#include "scenario.hpp"

int main(int argc, char** argv) {
    return qfluct::cli::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
