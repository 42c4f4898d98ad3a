#include "stefan/cli.hpp"

int main(int argc, char** argv) { return stefan::cli::main_entry(argc, argv); }
