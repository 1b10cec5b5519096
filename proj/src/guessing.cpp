#include "keyguess/guessing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "keyguess/errors.hpp"
#include "keyguess/kernels.hpp"

namespace keyguess {
namespace {

constexpr double kLn2 = 0.69314718055994530942;
// Above this exponent the moment sums are formed in the log domain.
constexpr double kLogDomainThreshold = 500.0;

void check_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DomainError(std::string(what) + ": index sets differ (" + std::to_string(a) + " vs " +
                      std::to_string(b) + ")");
  }
}

}  // namespace

double kraft_sum(std::span<const int> lengths) {
  CompensatedSum acc;
  for (int l : lengths) acc.add(std::ldexp(1.0, -l));
  return acc.value();
}

LengthFunction::LengthFunction(std::vector<int> lengths) : lengths_(std::move(lengths)) {
  for (std::size_t i = 0; i < lengths_.size(); ++i)
    if (lengths_[i] < 1)
      throw ValidationError("length function: length of string " + std::to_string(i) +
                            " is below 1");
  const double k = kraft_sum(lengths_);
  if (k > 1.0 + kKraftTolerance)
    throw ValidationError("length function: Kraft sum " + std::to_string(k) + " exceeds 1");
}

GuessOrder::GuessOrder(std::vector<std::size_t> ranks) : ranks_(std::move(ranks)) {
  std::vector<char> seen(ranks_.size(), 0);
  for (std::size_t r : ranks_) {
    if (r < 1 || r > ranks_.size() || seen[r - 1])
      throw ValidationError("guess order: ranks are not a permutation of 1..N");
    seen[r - 1] = 1;
  }
}

GuessOrder GuessOrder::from_sequence(std::span<const std::size_t> sequence) {
  std::vector<std::size_t> ranks(sequence.size(), 0);
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    if (sequence[i] >= sequence.size() || ranks[sequence[i]] != 0)
      throw ValidationError("guess order: sequence is not a permutation");
    ranks[sequence[i]] = i + 1;
  }
  return GuessOrder(std::move(ranks));
}

std::vector<std::size_t> GuessOrder::sequence() const {
  std::vector<std::size_t> seq(ranks_.size());
  for (std::size_t x = 0; x < ranks_.size(); ++x) seq[ranks_[x] - 1] = x;
  return seq;
}

double harmonic_number(std::size_t num_strings) {
  CompensatedSum acc;
  for (std::size_t i = num_strings; i >= 1; --i) acc.add(1.0 / static_cast<double>(i));
  return acc.value();
}

GuessOrder order_from_lengths(std::span<const int> lengths) {
  if (kraft_sum(lengths) > 1.0 + kKraftTolerance)
    throw ValidationError("order_from_lengths: lengths violate Kraft's inequality");
  std::vector<std::size_t> seq(lengths.size());
  std::iota(seq.begin(), seq.end(), std::size_t{0});
  std::stable_sort(seq.begin(), seq.end(),
                   [&](std::size_t a, std::size_t b) { return lengths[a] < lengths[b]; });
  return GuessOrder::from_sequence(seq);
}

GuessOrder order_from_lengths(const LengthFunction& lengths) {
  return order_from_lengths(lengths.lengths());
}

LengthFunction lengths_from_order(const GuessOrder& order) {
  const double c = harmonic_number(order.size());
  std::vector<int> lengths(order.size());
  for (std::size_t x = 0; x < order.size(); ++x) {
    const double v = c * static_cast<double>(order.rank(x));
    int l = static_cast<int>(std::ceil(std::log2(v)));
    // log2 can land just above an exact power of two.
    if (l > 0 && std::ldexp(1.0, l - 1) >= v) --l;
    lengths[x] = std::max(l, 1);
  }
  return LengthFunction(std::move(lengths));
}

GuessOrder interleave(const GuessOrder& first, std::span<const std::size_t> second) {
  const std::size_t n = first.size();
  const auto a = first.sequence();
  for (std::size_t x : second)
    if (x >= n) throw DomainError("interleave: list entry out of range");

  std::vector<char> guessed(n, 0);
  std::vector<std::size_t> merged;
  merged.reserve(n);
  std::size_t ia = 0;
  std::size_t ib = 0;
  bool turn_a = true;
  while (merged.size() < n) {
    auto& idx = turn_a ? ia : ib;
    const std::span<const std::size_t> list = turn_a ? std::span<const std::size_t>(a) : second;
    while (idx < list.size() && guessed[list[idx]]) ++idx;
    if (idx < list.size()) {
      guessed[list[idx]] = 1;
      merged.push_back(list[idx]);
      ++idx;
    }
    turn_a = !turn_a;
  }
  return GuessOrder::from_sequence(merged);
}

double log_moment(const GuessOrder& order, std::span<const double> p, double rho) {
  check_same_size(order.size(), p.size(), "moment");
  if (!(rho > 0.0)) throw DomainError("moment: rho must be positive");
  return kernels::omp::log_sum_exp(p.size(), [&](std::size_t x) {
    return p[x] > 0.0 ? std::log(p[x]) + rho * std::log(static_cast<double>(order.rank(x)))
                      : -std::numeric_limits<double>::infinity();
  });
}

double moment(const GuessOrder& order, std::span<const double> p, double rho) {
  check_same_size(order.size(), p.size(), "moment");
  if (!(rho > 0.0)) throw DomainError("moment: rho must be positive");
  return kernels::omp::sum(p.size(), [&](std::size_t x) {
    return p[x] > 0.0 ? p[x] * std::pow(static_cast<double>(order.rank(x)), rho) : 0.0;
  });
}

double log_saturated_moment(std::span<const int> lengths, std::span<const double> p, double rho,
                            unsigned n, double rate) {
  check_same_size(lengths.size(), p.size(), "saturated_moment");
  if (!(rho > 0.0)) throw DomainError("saturated_moment: rho must be positive");
  if (!(rate > 0.0)) throw DomainError("saturated_moment: rate must be positive");
  const double cap = static_cast<double>(n) * rate;
  auto exponent = [&](std::size_t x) { return rho * std::min(lengths[x] * kLn2, cap); };
  if (rho * cap <= kLogDomainThreshold) {
    const double s = kernels::omp::sum(p.size(), [&](std::size_t x) {
      return p[x] > 0.0 ? p[x] * std::exp(exponent(x)) : 0.0;
    });
    return std::log(s);
  }
  return kernels::omp::log_sum_exp(p.size(), [&](std::size_t x) {
    return p[x] > 0.0 ? std::log(p[x]) + exponent(x) : -std::numeric_limits<double>::infinity();
  });
}

double saturated_moment(const LengthFunction& lengths, std::span<const double> p, double rho,
                        unsigned n, double rate) {
  return std::exp(log_saturated_moment(lengths.lengths(), p, rho, n, rate));
}

}  // namespace keyguess
