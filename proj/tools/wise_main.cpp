#include "wise/cli.hpp"

int main(int argc, char** argv) { return wise::run_cli(argc, argv); }
