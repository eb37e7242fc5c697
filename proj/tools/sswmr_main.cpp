#include "sswmr/cli.hpp"

int main(int argc, char** argv) { return sswmr::cli_main(argc, argv); }
