#include <iostream>
#include <string>
#include <vector>

#include <delta_lab/cli.hpp>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return delta_lab::cli::run(args, std::cout, std::cerr);
}
