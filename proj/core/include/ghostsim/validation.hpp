#pragma once
#include <string>
#include <vector>

#include <json.hpp>

namespace ghostsim {

/// Pass thresholds for the built-in validation suite. Defaults are the
/// shipped contract; tests inject impossible values to prove the suite can
/// fail loudly.
struct Tolerances {
  double phase_cancel_analytic = 1e-12;
  double phase_cancel_bruteforce = 1e-3;
  double product_structure = 1e-12;
  double magnification_pixels = 1.0;
  double lens1_off_cv = 1e-6;
  double lens2_off_reldiff = 1e-6;
  double bc_spread = 1e-6;
  double dip_w_deviation = 1e-10;
  double even_screen_w = 1e-10;
  double coma_w_min = 1e-3;  ///< positive control must exceed this
  double common_mask_w = 1e-10;
  double classical_uniform = 1e-12;
  double classical_gaussian = 1e-2;
  double correlator = 1e-12;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string details;
};

/// Runs the validation criteria on the built-in desk-scale configuration
/// (n = 128, n_nu = 9). `select` limits the run to the given criterion ids
/// (empty = all). Deterministic for any thread count.
std::vector<CriterionResult> run_acceptance(const Tolerances& tol = {},
                                            const std::vector<int>& select = {},
                                            int threads = 0);

nlohmann::ordered_json acceptance_report(const std::vector<CriterionResult>& results);

}  // namespace ghostsim
