#include "biharm/cli.hpp"

int main(int argc, char** argv) {
    return biharm::run(argc, argv);
}
