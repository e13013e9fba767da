// Runs the validation suite at the shipped tolerances and prints one
// pass/fail line per criterion. Exits nonzero if any criterion fails.
#include <cstdio>

#include "ghostsim/validation.hpp"

int main() {
  const auto results = ghostsim::run_acceptance();
  bool all = true;
  for (const auto& r : results) {
    std::printf("[%s] %2d %-32s %s\n", r.passed ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.details.c_str());
    all = all && r.passed;
  }
  std::printf("%s\n", all ? "acceptance: all criteria passed"
                          : "acceptance: FAILURES present");
  return all ? 0 : 1;
}
