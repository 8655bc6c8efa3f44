#include "nblens/cli.hpp"

int main(int argc, char** argv) { return nblens::cli_run(argc, argv); }
