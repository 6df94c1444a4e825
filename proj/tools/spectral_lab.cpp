#include "spectral/pasting_lab.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return spectral::run_cli(argc, argv, std::cout, std::cerr);
}
