// Runs every release gate in order and prints one verdict line each.
// Exit code 0 means every criterion passed.

#include <cstdio>
#include <exception>
#include <vector>

#include "switchdiff/verify.hpp"

int main() {
  using Check = switchdiff::CriterionResult (*)();
  const std::vector<Check> gates = {
      switchdiff::check_union_kernel_identity,
      switchdiff::check_connectivity_dichotomy,
      switchdiff::check_covering_contraction,
      switchdiff::check_pathwise_convergence,
      switchdiff::check_exponential_rate,
      switchdiff::check_unit_clock_decay,
      switchdiff::check_occupation_fractions,
      switchdiff::check_interval_spectra,
      switchdiff::check_metric_gap_band,
      switchdiff::check_toy_switching,
      switchdiff::check_fiedler_interlacing,
  };

  int failures = 0;
  for (const Check gate : gates) {
    switchdiff::CriterionResult result;
    try {
      result = gate();
    } catch (const std::exception& e) {
      result.name = "unknown";
      result.detail = std::string("threw: ") + e.what();
      result.pass = false;
    }
    std::printf("%s %s (%.2f s): %s\n", result.pass ? "PASS" : "FAIL",
                result.name.c_str(), result.seconds, result.detail.c_str());
    std::fflush(stdout);
    if (!result.pass) ++failures;
  }

  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
