#include "uekit/cli.hpp"

int main(int argc, char** argv) { return uekit::cli_main(argc, argv); }
