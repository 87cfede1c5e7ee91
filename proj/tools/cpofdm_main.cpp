#include "cpofdm/cli.hpp"

int main(int argc, char** argv) {
    return cpofdm::cli::run(argc, argv);
}
