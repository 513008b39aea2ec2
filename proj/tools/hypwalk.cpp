#include "hypwalk/cli.hpp"

int main(int argc, char** argv) { return hypwalk::cli::run(argc, argv); }
