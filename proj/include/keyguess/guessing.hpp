#pragma once

// Guessing orders, Kraft-feasible length functions, the conversions between
// them, and exact moment evaluation.

#include <cstddef>
#include <span>
#include <vector>

namespace keyguess {

inline constexpr double kKraftTolerance = 1e-12;

/// Sum of 2^{-L(x)}.
double kraft_sum(std::span<const int> lengths);

/// Bit lengths satisfying Kraft's inequality; every length is at least 1.
class LengthFunction {
 public:
  LengthFunction() = default;
  /// Throws ValidationError on a nonpositive length or a Kraft violation.
  explicit LengthFunction(std::vector<int> lengths);

  std::span<const int> lengths() const noexcept { return lengths_; }
  std::size_t size() const noexcept { return lengths_.size(); }
  int operator[](std::size_t i) const { return lengths_[i]; }
  double kraft() const { return kraft_sum(lengths_); }

 private:
  std::vector<int> lengths_;
};

/// Guessing bijection: rank(x) in {1..N} is the guess number of string x.
class GuessOrder {
 public:
  GuessOrder() = default;
  /// Throws ValidationError unless `ranks` is a permutation of 1..N.
  explicit GuessOrder(std::vector<std::size_t> ranks);
  /// Builds the order whose i-th guess (0-based) is `sequence[i]`.
  static GuessOrder from_sequence(std::span<const std::size_t> sequence);

  std::span<const std::size_t> ranks() const noexcept { return ranks_; }
  std::size_t size() const noexcept { return ranks_.size(); }
  std::size_t rank(std::size_t x) const { return ranks_[x]; }
  /// The guess list: element i is the string guessed at step i + 1.
  std::vector<std::size_t> sequence() const;

 private:
  std::vector<std::size_t> ranks_;
};

/// Harmonic number sum_{i=1}^{N} 1/i (the constant c_n for N = |X|^n).
double harmonic_number(std::size_t num_strings);

/// Guess in increasing order of length, ties by ascending index. Guarantees
/// rank(x) <= 2^{L(x)}.
GuessOrder order_from_lengths(std::span<const int> lengths);
GuessOrder order_from_lengths(const LengthFunction& lengths);

/// L(x) = max(1, ceil(log2(c_N * rank(x)))). Kraft-feasible and satisfies
/// L - 1 - log2 c_N <= log2 rank <= L.
LengthFunction lengths_from_order(const GuessOrder& order);

/// Alternates between `first` (a full order) and the list `second`, skipping
/// strings already guessed. Every string's new rank is at most twice the
/// smaller of its two list positions.
GuessOrder interleave(const GuessOrder& first, std::span<const std::size_t> second);

/// E[rank(X)^rho] = sum_x p(x) rank(x)^rho.
double moment(const GuessOrder& order, std::span<const double> p, double rho);
double log_moment(const GuessOrder& order, std::span<const double> p, double rho);

/// ln sum_x p(x) exp{rho min(L(x) ln 2, nR)}; R in nats per letter.
double log_saturated_moment(std::span<const int> lengths, std::span<const double> p, double rho,
                            unsigned n, double rate);
/// exp of log_saturated_moment; may overflow to +inf for very large rho*nR.
double saturated_moment(const LengthFunction& lengths, std::span<const double> p, double rho,
                        unsigned n, double rate);

}  // namespace keyguess
