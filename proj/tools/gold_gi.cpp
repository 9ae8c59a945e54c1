#include "goldgi/harness.hpp"

int main(int argc, char** argv) { return goldgi::run_cli(argc, argv); }
