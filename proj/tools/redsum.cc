#include "redsum/cli.h"

int main(int argc, char** argv) { return redsum::cli::run(argc, argv); }
