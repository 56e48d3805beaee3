#include "chainrec/cli.hpp"

int main(int argc, char** argv) { return chainrec::run_cli(argc, argv); }
