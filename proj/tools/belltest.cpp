#include "belltest/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return belltest::cli::run(argc, argv, std::cout, std::cerr);
}
