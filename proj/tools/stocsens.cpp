#include "stocsens/cli/commands.hpp"

int main(int argc, char** argv) { return stocsens::cli::run(argc, argv); }
