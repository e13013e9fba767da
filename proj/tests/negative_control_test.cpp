// Proves the validation suite can fail: an impossible tolerance on one
// criterion must produce a FAIL that names that criterion, while the
// untouched criteria still pass.
#include <cstdio>
#include <string>

#include "ghostsim/validation.hpp"

int main() {
  using namespace ghostsim;

  Tolerances tampered;
  tampered.phase_cancel_bruteforce = 1e-18;  // below quadrature reach
  const auto results = run_acceptance(tampered, {1, 2, 3});

  bool saw_named_failure = false;
  bool others_pass = true;
  for (const auto& r : results) {
    std::printf("[%s] %2d %s\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str());
    if (r.id == 2 && !r.passed && r.name == "phase-cancellation-bruteforce")
      saw_named_failure = true;
    if (r.id != 2 && !r.passed) others_pass = false;
  }
  if (!saw_named_failure) {
    std::printf("negative control FAILED: tampered criterion did not fail\n");
    return 1;
  }
  if (!others_pass) {
    std::printf("negative control FAILED: untouched criteria failed\n");
    return 1;
  }
  std::printf("negative control passed: tampered tolerance fails by name\n");
  return 0;
}
