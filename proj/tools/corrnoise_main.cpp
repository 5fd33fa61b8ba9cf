#include "corrnoise/cli.hpp"

int main(int argc, char** argv) { return corrnoise::cli::run(argc, argv); }
