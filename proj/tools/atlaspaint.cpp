#include "atlaspaint/cli.hpp"

int main(int argc, char** argv) { return atlaspaint::run_cli(argc, argv); }
