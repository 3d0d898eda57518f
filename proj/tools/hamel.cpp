#include "hamel/cli.hpp"

int main(int argc, char** argv) { return hamel::cli::run(argc, argv); }
