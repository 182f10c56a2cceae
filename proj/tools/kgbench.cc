#include <iostream>

#include "kgbench/pipeline.h"

int main(int argc, char** argv) { return kgbench::run_cli(argc, argv, std::cout, std::cerr); }
