#include "impstab/cli.hpp"

int main(int argc, char** argv) { return impstab::run_cli(argc, argv); }
