#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "cdf/stacklimit.hpp"

int main(int argc, char** argv) {
  cdf::raise_stack_limit();
  return doctest::Context(argc, argv).run();
}
