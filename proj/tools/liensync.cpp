#include "liensync/cli.hpp"

int main(int argc, char** argv) { return liensync::cli::run(argc, argv); }
