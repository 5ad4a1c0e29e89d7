#include "deltacurve/cli.hpp"

int main(int argc, char** argv) { return deltacurve::cli::run(argc, argv); }
