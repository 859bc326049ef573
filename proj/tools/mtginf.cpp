#include "mtginf/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return mtginf::run(args, std::cout, std::cerr);
}
