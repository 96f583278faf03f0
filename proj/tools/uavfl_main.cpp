#include "uavfl/cli.hpp"

int main(int argc, char** argv) { return uavfl::cli::run_main(argc, argv); }
