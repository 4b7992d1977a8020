#include "txnforge/cli.hpp"

int main(int argc, char** argv) {
    return txnforge::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
