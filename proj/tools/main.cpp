#include "qcd/cli.hpp"

int main(int argc, char** argv) { return qcd::cli::run(argc, argv); }
