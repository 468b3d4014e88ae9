#include "rbfpu/commands.hpp"

int main(int argc, char** argv) { return rbfpu::cli::run(argc, argv); }
