#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fluxmech {

/// Outcome of one acceptance criterion of the self test.
struct CriterionResult {
  int index = 0;      ///< 1-based criterion number
  std::string label;  ///< what the criterion checks
  bool passed = false;
  std::string detail; ///< measured values and the pinned tolerance
};

/// Runs the ten acceptance criteria, streaming one PASS/FAIL line per
/// criterion to `out` as each finishes. `cli_exe` is the path of the
/// command-line binary that the determinism criterion re-invokes under
/// different worker counts; an empty path fails that criterion with a
/// diagnostic instead of skipping it. A criterion that throws is reported
/// as failed with the exception message.
[[nodiscard]] std::vector<CriterionResult> run_acceptance(std::ostream& out,
                                                          const std::string& cli_exe);

/// True when every criterion in `results` passed.
[[nodiscard]] bool all_passed(const std::vector<CriterionResult>& results);

} // namespace fluxmech
