#include "strain_cascade/commands.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return strain_cascade::run_cli(argc, argv, std::cout, std::cerr);
}
