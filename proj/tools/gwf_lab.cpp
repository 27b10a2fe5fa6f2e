#include "harness.hpp"

int main(int argc, char** argv) { return gwf::lab::run_cli(argc, argv); }
