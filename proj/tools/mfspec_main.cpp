#include "mfspec/cli.hpp"

int main(int argc, char** argv) { return mfspec::cli::main_entry(argc, argv); }
