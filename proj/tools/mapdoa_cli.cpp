#include "mapdoa/bench.hpp"

int main(int argc, char** argv) { return mapdoa::cli_main(argc, argv); }
