#include "twistab/cli.hpp"

int main(int argc, char** argv) { return twistab::cli_main(argc, argv); }
