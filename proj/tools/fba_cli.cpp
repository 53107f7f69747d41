#include "cli_app.hpp"

int main(int argc, char** argv) { return fba::cli::run_cli(argc, argv); }
