#include "mcsched_cli.hpp"

int main(int argc, char** argv) { return mcs::cli::run(argc, argv); }
