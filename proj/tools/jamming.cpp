#include "jamming/cli.hpp"

int main(int argc, char** argv) { return jam::cli::run(argc, argv); }
