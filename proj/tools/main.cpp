#include "esadrnn/cli.hpp"

int main(int argc, char** argv) { return esadrnn::run_cli(argc, argv); }
