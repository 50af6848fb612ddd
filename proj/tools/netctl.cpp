#include "netctl/cli.hpp"

int main(int argc, char** argv) { return netctl::run(argc, argv); }
