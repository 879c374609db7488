#include <cstdio>

int main() {
  std::puts("rmt-lab: subcommands not wired up yet");
  return 2;
}
