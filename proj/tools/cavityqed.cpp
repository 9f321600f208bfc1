#include "cavityqed/cli.hpp"

int main(int argc, char** argv) { return cavityqed::run_cli(argc, argv); }
