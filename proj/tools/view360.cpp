#include "view360/cli.hpp"

int main(int argc, char** argv) { return view360::cli_main(argc, argv); }
