#include "phikit/cli.hpp"

int main(int argc, char** argv) { return phikit::cli::run(argc, argv); }
