#include "steincmp/cli.hpp"

int main(int argc, char** argv) { return steincmp::cli_main(argc, argv); }
