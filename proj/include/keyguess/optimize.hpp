#pragma once

// One-dimensional minimization and root bracketing shared by the bound and
// exponent code.

#include <cstddef>
#include <functional>

namespace keyguess {

struct ScalarMin {
  double x = 0.0;
  double value = 0.0;
  bool unimodal = true;  // the scan sequence decreased then increased
};

inline constexpr std::size_t kDefaultScanPoints = 1024;

/// Golden-section search on [a, b] to absolute width `tol`.
ScalarMin golden_section(const std::function<double(double)>& f, double a, double b,
                         double tol = 1e-12, std::size_t max_iter = 200);

/// Uniform scan of `points` points on [a, b] (endpoints included), then
/// golden-section on the cell around the scan minimum. The returned value is
/// never worse than the best scanned point.
ScalarMin scan_then_golden(const std::function<double(double)>& f, double a, double b,
                           std::size_t points = kDefaultScanPoints);

/// Root of a sign-changing f on [a, b] to absolute width `tol`.
double bisect_root(const std::function<double(double)>& f, double a, double b,
                   double tol = 1e-13);

}  // namespace keyguess
