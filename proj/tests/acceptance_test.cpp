// Acceptance suite: runs every cross-validation criterion at its pinned
// tolerance and prints one pass/fail line per criterion.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include "batchq/verify.hpp"

TEST_CASE("acceptance criteria") {
  batchq::verify::Options opts;  // 1e5 Monte Carlo paths, fixed seed
  const std::vector<batchq::verify::CheckResult> results =
      batchq::verify::run_all(opts);
  REQUIRE(results.size() == 9);
  bool all = true;
  for (const auto& r : results) {
    std::printf("[%s] %s: %s [%.2f s]\n", r.pass ? "PASS" : "FAIL",
                r.name.c_str(), r.detail.c_str(), r.seconds);
    all = all && r.pass;
    CHECK_MESSAGE(r.pass, r.name, ": ", r.detail);
  }
  CHECK(all);
}
