#include "ehcr/cli.hpp"

int main(int argc, char** argv) { return ehcr::cli_main(argc, argv); }
