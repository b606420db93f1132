#include <iostream>

#include <supercluster/app/cli.hpp>

int main(int argc, char** argv) { return supercluster::app::run_cli(argc, argv, std::cout, std::cerr); }
