#include "uqx/cli.hpp"

int main(int argc, char** argv) { return uqx::run_cli(argc, argv); }
