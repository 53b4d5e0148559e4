#include "prefsearch/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return prefsearch::run_command(args, std::cout, std::cerr);
}
