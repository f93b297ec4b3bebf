#include "levyruin/cli.hpp"

int main(int argc, char** argv) { return levyruin::cli::main_entry(argc, argv); }
