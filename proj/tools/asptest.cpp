#include <asptest/cli.hpp>

#include <iostream>

int main(int argc, char** argv) { return asptest::cli::run(argc, argv, std::cout, std::cerr); }
