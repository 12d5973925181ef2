#include "vimu/cli.hpp"

int main(int argc, char** argv) { return vimu::cli::run(argc, argv); }
