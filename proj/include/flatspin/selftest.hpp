#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace flatspin {

struct SelfCheck {
  std::string name;
  long trials = 0;
  long failures = 0;
  double max_error = 0.0;
  double tolerance = 0.0;
};

struct SelfTestReport {
  std::vector<SelfCheck> checks;

  bool passed() const {
    for (const auto& c : checks)
      if (c.failures) return false;
    return true;
  }
};

/// Seeded randomized identities: norm multiplicativity, invertibility classification, square
/// roots inside the cone, bracket symmetries (trials each) and the two rotation planes of the
/// circle factors (rotation_trials each). Errors are relative to max(1, |expected|).
SelfTestReport run_selftest(long trials, std::uint64_t seed, double algebra_tol = 1e-12, double rotation_tol = 1e-12,
                            long rotation_trials = 100);

}  // namespace flatspin
