#pragma once

// Single-letter guessing exponents: the dual formula, a simplex-grid check of
// the primal, the error / correct-decoding split, Markov and unifilar rates,
// regime thresholds, and the Legendre-Fenchel transform in rho.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "keyguess/optimize.hpp"
#include "keyguess/sources.hpp"

namespace keyguess {

struct DualResult {
  double value = 0.0;
  double theta = 0.0;      // minimizing theta in [0, rho]
  bool unimodal = true;    // scan looked unimodal
};

/// min over theta in [0, rho] of (rho - theta) R + phi(theta), phi(theta)
/// being theta times the Rényi entropy (rate) of order 1/(1+theta).
DualResult dual_minimize(const std::function<double(double)>& phi, double rho, double rate,
                         std::size_t scan_points = kDefaultScanPoints);

DualResult iid_exponent_dual_detail(std::span<const double> p1, double rho, double rate);
double iid_exponent_dual(std::span<const double> p1, double rho, double rate);

inline constexpr std::size_t kGridMaxAlphabet = 4;

struct GridResult {
  double value = 0.0;
  std::vector<double> argmax;  // maximizing Q over the full alphabet
  double grid_value = 0.0;     // before Nelder-Mead
  double step = 0.0;           // step actually used
  std::size_t points = 0;
};

/// max over Q of rho min(H(Q), R) - D(Q || P1) on a barycentric grid with
/// Nelder-Mead refinement; |X| <= 4.
GridResult iid_exponent_grid(std::span<const double> p1, double rho, double rate,
                             double step = 1e-2);

/// inf over {H(Q) > R} of D(Q || P1): 0 when R <= H(P1), +inf when R is at
/// least ln |supp P1|.
double iid_error_exponent(std::span<const double> p1, double rate);

/// max over {H(Q) <= R} of rho H(Q) - D(Q || P1).
double iid_correct_term(std::span<const double> p1, double rho, double rate);

struct Decomposition {
  double lhs = 0.0;   // max(rho R - error exponent, correct term)
  double rhs = 0.0;   // dual
  double gap = 0.0;
};
Decomposition decomposition_check(std::span<const double> p1, double rho, double rate);

struct MarkovGrid {
  double value = -std::numeric_limits<double>::infinity();
  std::vector<double> eta;   // maximizing transition matrix, row-major
  double step = 0.0;
  std::size_t points = 0;    // irreducible matrices evaluated
};

inline constexpr std::size_t kMarkovGridMaxPoints = std::size_t{1} << 21;

/// min over theta of (rho - theta) R + (1 + theta) ln lambda(pi^{o 1/(1+theta)}).
DualResult markov_exponent(const StochasticMatrix& pi, double rho, double rate);

/// Supremum over irreducible eta of rho min(H(eta|q), R) - D(eta || pi | q),
/// q = stationary(eta), on a row-simplex grid. The step is coarsened when the
/// grid would exceed kMarkovGridMaxPoints.
MarkovGrid markov_exponent_grid(const StochasticMatrix& pi, double rho, double rate,
                                double step = 1e-2);

/// theta H_{1/(1+theta)} rate of a model. Explicit models use their longest
/// listed PMF normalized by its block length and are flagged non-asymptotic.
struct RateValue {
  double value = 0.0;
  bool asymptotic = true;
  unsigned n = 0;  // block length of the finite-n proxy, 0 when asymptotic
};
RateValue scaled_renyi_rate(const SourceModel& model, double theta);
RateValue entropy_rate(const SourceModel& model);
/// ln |X| for a model, or ln N / n for explicit models.
double max_entropy_rate(const SourceModel& model);

DualResult exponent_dual(const SourceModel& model, double rho, double rate);

/// rho H_{1/(1+rho)} rate.
RateValue perfect_secrecy_exponent(const SourceModel& model, double rho);

struct Thresholds {
  double h_p = 0.0;
  double h_prime = 0.0;
  double e_max = 0.0;
};
Thresholds thresholds(std::span<const double> p1, double rho);
Thresholds thresholds(const SourceModel& model, double rho);

enum class Branch { kLinear, kInterior, kSaturated };
std::string to_string(Branch b);

struct CurveSample {
  double rate = 0.0;
  double value = 0.0;
  double theta = 0.0;
  Branch branch = Branch::kLinear;
};

struct ExponentCurve {
  double rho = 0.0;
  std::vector<CurveSample> samples;
  double h_p = 0.0;
  double h_prime = 0.0;
  double e_max = 0.0;
  bool asymptotic = true;
};

ExponentCurve exponent_curve(const SourceModel& model, double rho, std::span<const double> rates);

struct LfSample {
  double lambda = 0.0;
  double value = 0.0;   // sup over the rho grid (with rho = 0, E = 0) of lambda rho - E
  double argmax = 0.0;
  bool at_boundary = false;  // maximizer is the largest rho: the transform may be larger
};

/// Discrete Legendre-Fenchel transform of rho -> E(R, rho). Throws DataError
/// when the samples are not convex within 1e-6.
std::vector<LfSample> legendre_fenchel(std::span<const double> rhos, std::span<const double> values,
                                       std::span<const double> lambdas);

struct VariationalCheck {
  double lhs = 0.0;         // (1 + theta) ln sum_B p^{1/(1+theta)}
  double rhs = 0.0;         // theta H(nu*) - D(nu* || p) at the tilted maximizer
  double gap = 0.0;
  double max_excess = 0.0;  // max over random nu in M(B) of objective - lhs
};

/// Both sides of (1+theta) ln sum_B p^{1/(1+theta)} = max_{nu on B} theta H(nu) - D(nu || p).
VariationalCheck variational_identity_check(std::span<const double> p, double theta,
                                            std::span<const std::size_t> subset,
                                            std::uint64_t seed = 0, std::size_t trials = 1000);

}  // namespace keyguess
