#pragma once

// The saturated-cost compression problem: relaxed and integer optima, the
// top-set split into error and correct-decoding terms, and finite-n bounds.

#include <cstddef>
#include <span>
#include <vector>

#include "keyguess/sources.hpp"

namespace keyguess {

struct TopSetSummary {
  unsigned n = 1;
  double rate = 0.0;
  double rho = 0.0;
  std::size_t m = 0;                      // floor(exp(nR)), saturating at SIZE_MAX
  std::vector<std::size_t> top_indices;   // first min(M, N) of sort_desc
  double mass = 0.0;                      // F
  double mass_complement = 0.0;           // F^c, summed directly over the complement
  double tilted_sum = 0.0;                // sum over top of p^{1/(1+rho)}
};

/// floor(exp(nR)) with a 1e-9 guard for exact integers, capped at SIZE_MAX.
std::size_t top_set_size(unsigned n, double rate);

TopSetSummary top_set(std::span<const double> p, unsigned n, double rate, double rho);

struct SaturatedOptimum {
  double value = 0.0;            // (1/n) ln of the optimal cost
  std::vector<double> lengths;   // nats; +inf for saturated strings
  std::size_t active_set_size = 0;
  double slack = 0.0;            // rho ln2 / n, gap to the integer optimum
  double kraft = 0.0;            // sum over the active set of exp(-length)
  std::size_t clamp_moves = 0;   // strings moved to the saturated set by the sweep
};

/// min over real lengths of (1/n) ln sum_x p(x) exp{rho min(l(x), nR)} subject
/// to sum exp(-l) <= 1, searched over probability-prefix active sets.
SaturatedOptimum relaxed_optimum(std::span<const double> p, unsigned n, double rho, double rate);

/// (1/n) ln{ F^c e^{rho nR} + (sum over T_R of p^{1/(1+rho)})^{1+rho} }.
double fixed_set_kernel(std::span<const double> p, unsigned n, double rho, double rate);

struct IntegerOptimum {
  double value = 0.0;         // (1/n) ln of the minimal saturated cost
  std::vector<int> lengths;   // bits, original index order
  std::size_t nodes = 0;      // search nodes visited
};

inline constexpr std::size_t kIntegerBruteForceMax = 10;

/// Exact integer optimum by exhaustive search; N <= 10.
IntegerOptimum integer_bruteforce(std::span<const double> p, double rho, double rate, unsigned n);

/// (1/n) ln F^c; -inf when F^c = 0.
double error_term(std::span<const double> p, unsigned n, double rate);

/// (1 + rho) (1/n) ln sum over T_R of p^{1/(1+rho)}.
double correct_decoding_term(std::span<const double> p, unsigned n, double rho, double rate);

struct FiniteBound {
  double value = 0.0;
  double slack = 0.0;
};

/// max(rho R + error_term, correct_decoding_term), with slack
/// rho (ln 2 + ln(1 + ln N)) / n.
FiniteBound lower_bound_finite(std::span<const double> p, unsigned n, double rho, double rate);

/// (1/n) min over theta in [0, rho] of (rho - theta) nR + theta H_{1/(1+theta)}(p),
/// plus ln2 / n (reported as the slack).
FiniteBound upper_bound_finite(std::span<const double> p, unsigned n, double rho, double rate,
                               std::size_t scan_points = 1024);

}  // namespace keyguess
