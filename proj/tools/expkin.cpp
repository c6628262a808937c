#include "expkin/harness/cli.hpp"

int main(int argc, char** argv) { return expkin::run_cli(argc, argv); }
