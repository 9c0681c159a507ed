#include "mregen/input.hpp"

int main(int argc, char** argv) { return mregen::run_main(argc, argv); }
