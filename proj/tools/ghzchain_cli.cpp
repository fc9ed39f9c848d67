#include "ghzchain/cli.hpp"

int main(int argc, char** argv) { return ghzchain::run(argc, argv); }
