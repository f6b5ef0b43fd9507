#include <iostream>

#include "pparab/cli.hpp"

int main(int argc, char** argv)
{
    return pparab::cli::main_entry(argc, argv, std::cout, std::cerr);
}
