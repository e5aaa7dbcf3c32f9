#include "doctest.h"

#include "kgc/dist_calc.hpp"

using namespace kgc;

TEST_CASE("suite smoke") {
  auto rep = run_lemma_a_suite(7);
  for (auto &f : rep.failures) MESSAGE(f);
  CHECK(rep.pass());
}
