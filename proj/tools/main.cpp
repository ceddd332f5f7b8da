#include "runner.hpp"

int main(int argc, char** argv) { return glauber::cli::main_entry(argc, argv); }
