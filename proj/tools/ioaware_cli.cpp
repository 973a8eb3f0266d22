#include "ioaware/cli.hpp"

int main(int argc, char** argv) { return ioaware::run_cli(argc, argv); }
