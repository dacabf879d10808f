#include "catex/cli.hpp"

int main(int argc, char** argv) { return catex::run_cli(argc, argv); }
