#include "nskqg/cli.hpp"

int main(int argc, char** argv) { return nskqg::run_cli(argc, argv); }
