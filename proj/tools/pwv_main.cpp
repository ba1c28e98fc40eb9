#include "pwv/cli.hpp"

int main(int argc, char** argv) { return pwv::run(argc, argv); }
