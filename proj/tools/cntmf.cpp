#include "cntmf/cli.hpp"

int main(int argc, char** argv) { return cntmf::cli::run(argc, argv); }
