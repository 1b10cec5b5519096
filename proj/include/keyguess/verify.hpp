#pragma once

// Cross-module identity and inequality checks run by the `verify` command.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace keyguess {

struct CheckResult {
  std::string name;
  std::size_t cases = 0;
  double worst = 0.0;      // largest observed violation measure
  double tolerance = 0.0;  // pass when worst <= tolerance
  bool pass = false;
};

/// Runs every registered check with draws from `seed`. `tolerance_scale`
/// multiplies the tolerances of the floating-point identities.
std::vector<CheckResult> run_verification(std::uint64_t seed, double tolerance_scale = 1.0);

}  // namespace keyguess
