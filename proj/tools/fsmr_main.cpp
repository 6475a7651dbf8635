#include "fsmr/cli.hpp"

int main(int argc, char** argv) { return fsmr::cli::run_cli(argc, argv); }
