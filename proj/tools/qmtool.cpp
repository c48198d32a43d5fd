#include <iostream>

#include "quasimetric/app.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return quasimetric::app::run(args, std::cout, std::cerr);
}
