#include <govsim/cli.hpp>

int main(int argc, char** argv) { return govsim::cli_main(argc, argv); }
