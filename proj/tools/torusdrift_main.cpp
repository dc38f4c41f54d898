#include <cstdio>

int main(int argc, char** argv) {
  (void)argc;
  (void)argv;
  std::fprintf(stderr, "torusdrift: no subcommand given\n");
  return 1;
}
