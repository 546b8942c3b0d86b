#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

// Runs the full acceptance suite (the same one `fluxmech selftest` executes)
// and requires every criterion to pass. FLUXMECH_CLI_PATH is injected by the
// build so the determinism criterion can shell out to the real binary.

#include <iostream>
#include <string>

#include "fluxmech/selftest.hpp"

#ifndef FLUXMECH_CLI_PATH
#define FLUXMECH_CLI_PATH ""
#endif

TEST_CASE("acceptance suite") {
  const std::vector<fluxmech::CriterionResult> results =
      fluxmech::run_acceptance(std::cout, FLUXMECH_CLI_PATH);
  REQUIRE(results.size() == 10);
  for (const fluxmech::CriterionResult& r : results) {
    INFO("criterion ", r.index, ": ", r.label, " -> ", r.detail);
    CHECK(r.passed);
  }
}
