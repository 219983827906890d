#include "topgrad/experiments.hpp"

int main(int argc, char** argv) { return topgrad::run_cli(argc, argv); }
