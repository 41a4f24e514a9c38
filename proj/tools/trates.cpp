#include "trates/cli/app.hpp"

int main(int argc, char** argv) { return trates::cli::run(argc, argv); }
