#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace switchdiff {

/// One self-contained correctness check with pinned tolerances and fixed
/// internal seeds.  `detail` records the measured extremes so a failure is
/// diagnosable from the report alone.
struct CriterionResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct SuiteReport {
  std::string suite;
  std::vector<CriterionResult> criteria;

  bool pass() const;
};

// Projector and kernel structure.
CriterionResult check_union_kernel_identity();
CriterionResult check_connectivity_dichotomy();
CriterionResult check_fiedler_interlacing();

// Contraction of switched products.
CriterionResult check_covering_contraction();
CriterionResult check_unit_clock_decay();

// Long-time behavior of random switching.
CriterionResult check_pathwise_convergence();
CriterionResult check_exponential_rate();
CriterionResult check_occupation_fractions();

// One-dimensional meshes.
CriterionResult check_interval_spectra();
CriterionResult check_metric_gap_band();
CriterionResult check_toy_switching();

const std::vector<std::string>& suite_names();

/// Runs one named group: kernels, contraction, rates, metric, or toy.
/// Unknown names throw; check failures are verdicts, not errors.
SuiteReport run_suite(const std::string& suite);

nlohmann::json suite_to_json(const SuiteReport& report);

}  // namespace switchdiff
