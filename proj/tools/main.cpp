#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return qmtbdd::cli::run(argc, argv, std::cout, std::cerr);
}
