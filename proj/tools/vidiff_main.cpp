#include <vector>

#include "vidiff/cli.hpp"

int main(int argc, char** argv) {
    return vidiff::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
