#include "chaosfit/commands.hpp"

int main(int argc, char** argv) { return chaosfit::run_cli(argc, argv); }
