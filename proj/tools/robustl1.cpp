#include "robustl1/cli.hpp"

int main(int argc, char** argv) { return robustl1::cli_main(argc, argv); }
