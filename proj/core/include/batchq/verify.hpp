#pragma once

#include <string>
#include <vector>

namespace batchq::verify {

// Cross-validation suite behind the CLI `verify` command and the acceptance
// test binary: recurrence vs contour resolvents, analytic oracles, Monte
// Carlo confidence checks, and diffusion-limit trends. Each check pins its
// tolerance in code.
struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;   // measured deviation vs tolerance, human-readable
  double seconds = 0.0;
};

struct Options {
  // Path/replication counts for the Monte Carlo checks; the defaults match
  // the acceptance criteria.
  int mc_paths = 100000;
  std::uint64_t seed = 20260810;
  bool include_simulation = true;  // MC checks dominate the runtime
  bool include_diffusion = true;
};

std::vector<CheckResult> run_all(const Options& opts = {});

// Individual criteria (numbered as in the acceptance suite).
CheckResult check_root_correctness();
CheckResult check_resolvent_cross_validation();
CheckResult check_exit_completeness(const Options& opts);
CheckResult check_busy_period(const Options& opts);
CheckResult check_stationary(const Options& opts);
CheckResult check_transient_consistency();
CheckResult check_first_loss(const Options& opts);
CheckResult check_diffusion_limits();
CheckResult check_inversion_calibration();

}  // namespace batchq::verify
