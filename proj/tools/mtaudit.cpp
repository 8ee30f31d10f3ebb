#include "mtaudit/cli.hpp"

int main(int argc, char** argv) { return mtaudit::cli::run(argc, argv); }
