#include <cstdio>

int main() {
    std::puts("carrier-lab: experiment CLI (subcommands land with the io module)");
    return 1;
}
