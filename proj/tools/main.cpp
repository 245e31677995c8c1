#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv)
{
    return seasoned::cli::run({argv + 1, argv + argc}, std::cout);
}
