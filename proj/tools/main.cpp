#include "tlsscope/cli.hpp"

int main(int argc, char** argv) { return tlsscope::run_command(argc, argv); }
