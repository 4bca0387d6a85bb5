#include "smallcap/harness.hpp"

int main(int argc, char** argv) { return smallcap::harness::run_cli(argc, argv); }
