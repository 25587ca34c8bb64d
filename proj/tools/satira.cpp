#include "satira/cli.hpp"

int main(int argc, char** argv) { return satira::cli::run(argc, argv); }
