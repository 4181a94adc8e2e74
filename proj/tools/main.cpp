#include "mathverify/cli.hpp"

int main(int argc, char** argv) { return mathverify::cli_main(argc, argv); }
