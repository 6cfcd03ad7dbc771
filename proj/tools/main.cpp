#include "cfmcast/bench.hpp"

int main(int argc, char** argv) { return cfmcast::cli_main(argc, argv); }
