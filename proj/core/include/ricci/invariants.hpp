#pragma once

#include <string>
#include <vector>

namespace ricci {

struct CheckResult {
  std::string name;
  bool passed = false;
  /// Measured defect and the bound it is compared against.
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

/// Structural invariants of every module at modest resolution. With
/// oracles set, also compares the spectral paths against the dense
/// reference implementations at 32 nodes per axis or fewer.
std::vector<CheckResult> run_invariant_suite(bool oracles);

}  // namespace ricci
