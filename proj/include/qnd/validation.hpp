#pragma once

#include <string>
#include <vector>

namespace qnd {

/// One named numerical check with its measured figure and threshold.
struct CheckResult {
  std::string suite;
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

/// Squeezed (projective) and anti-squeezed (non-destructive) probe limits,
/// plus the vacuum-probe convolution identity.
std::vector<CheckResult> validate_limits();

/// Three-stage chain against the closed-form conditional output on a
/// 3 x 3 x 3 sweep of (phi, probe variance, x0).
std::vector<CheckResult> validate_pipeline();

}  // namespace qnd
