#include "predinfer/cli.hpp"

int main(int argc, char** argv) { return predinfer::cli::run(argc, argv); }
