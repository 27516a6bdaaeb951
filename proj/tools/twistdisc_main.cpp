#include "twistdisc/cli.hpp"

int main(int argc, char** argv) { return twistdisc::cli_main(argc, argv); }
