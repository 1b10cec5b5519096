#include "keyguess/compression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "keyguess/errors.hpp"
#include "keyguess/kernels.hpp"
#include "keyguess/optimize.hpp"

namespace keyguess {
namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_args(double rho, double rate, unsigned n) {
  if (n == 0) throw DomainError("block length n must be positive");
  if (!(rho > 0.0)) throw DomainError("rho must be positive");
  if (!(rate > 0.0)) throw DomainError("rate R must be positive");
}

double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// Suffix masses tail[k] = sum_{r >= k} p[order[r]], each formed directly.
std::vector<double> suffix_mass(std::span<const double> p, const std::vector<std::size_t>& order) {
  std::vector<double> tail(order.size() + 1, 0.0);
  CompensatedSum acc;
  for (std::size_t r = order.size(); r-- > 0;) {
    acc.add(p[order[r]]);
    tail[r] = acc.value();
  }
  return tail;
}

}  // namespace

std::size_t top_set_size(unsigned n, double rate) {
  const double e = static_cast<double>(n) * rate;
  if (e >= 43.0) return std::numeric_limits<std::size_t>::max();
  return static_cast<std::size_t>(std::floor(std::exp(e) + 1e-9));
}

TopSetSummary top_set(std::span<const double> p, unsigned n, double rate, double rho) {
  check_args(rho, rate, n);
  TopSetSummary s;
  s.n = n;
  s.rate = rate;
  s.rho = rho;
  s.m = top_set_size(n, rate);
  const auto order = sort_desc(p);
  const std::size_t k = std::min(s.m, order.size());
  s.top_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  const double beta = 1.0 / (1.0 + rho);
  s.mass = kernels::omp::sum(k, [&](std::size_t r) { return p[order[r]]; });
  s.mass_complement =
      kernels::omp::sum(order.size() - k, [&](std::size_t r) { return p[order[k + r]]; });
  s.tilted_sum = kernels::omp::sum(k, [&](std::size_t r) {
    const double v = p[order[r]];
    return v > 0.0 ? std::pow(v, beta) : 0.0;
  });
  return s;
}

SaturatedOptimum relaxed_optimum(std::span<const double> p, unsigned n, double rho, double rate) {
  check_args(rho, rate, n);
  const std::size_t size = p.size();
  const double beta = 1.0 / (1.0 + rho);
  const double cap = static_cast<double>(n) * rate;
  const auto order = sort_desc(p);
  const auto tail = suffix_mass(p, order);

  std::vector<double> log_prefix(size + 1, -kInf);
  CompensatedSum acc;
  for (std::size_t r = 0; r < size; ++r) {
    const double v = p[order[r]];
    if (v > 0.0) acc.add(std::pow(v, beta));
    log_prefix[r + 1] = acc.value() > 0.0 ? std::log(acc.value()) : -kInf;
  }

  auto log_cost = [&](std::size_t k) {
    const double active = log_prefix[k] == -kInf ? -kInf : (1.0 + rho) * log_prefix[k];
    const double saturated = tail[k] > 0.0 ? std::log(tail[k]) + rho * cap : -kInf;
    return log_add(active, saturated);
  };
  const ArgMin best = kernels::omp::argmin(size + 1, log_cost);

  // Fixed-point clamp: a string whose tilted length exceeds nR is cheaper
  // saturated.
  auto tilted_length = [&](std::size_t r, std::size_t k) {
    return -beta * std::log(p[order[r]]) + log_prefix[k];
  };
  std::size_t k = best.index;
  std::size_t moves = 0;
  while (k > 0 && (p[order[k - 1]] <= 0.0 || tilted_length(k - 1, k) > cap)) {
    if (p[order[k - 1]] > 0.0) ++moves;
    --k;
  }

  SaturatedOptimum out;
  out.value = (moves == 0 ? best.value : log_cost(k)) / n;
  out.active_set_size = k;
  out.clamp_moves = moves;
  out.slack = rho * kLn2 / n;
  out.lengths.assign(size, kInf);
  CompensatedSum kraft;
  for (std::size_t r = 0; r < k; ++r) {
    out.lengths[order[r]] = tilted_length(r, k);
    kraft.add(std::exp(-out.lengths[order[r]]));
  }
  out.kraft = kraft.value();
  if (!std::isfinite(out.value)) throw NumericalError("relaxed_optimum: non-finite cost");
  return out;
}

double fixed_set_kernel(std::span<const double> p, unsigned n, double rho, double rate) {
  const TopSetSummary s = top_set(p, n, rate, rho);
  const double active = s.tilted_sum > 0.0 ? (1.0 + rho) * std::log(s.tilted_sum) : -kInf;
  const double saturated =
      s.mass_complement > 0.0 ? std::log(s.mass_complement) + rho * n * rate : -kInf;
  return log_add(active, saturated) / n;
}

IntegerOptimum integer_bruteforce(std::span<const double> p, double rho, double rate, unsigned n) {
  check_args(rho, rate, n);
  const std::size_t size = p.size();
  if (size == 0 || size > kIntegerBruteForceMax)
    throw SizeError("integer_bruteforce: requires 1 <= N <= " +
                    std::to_string(kIntegerBruteForceMax));
  const double nr = static_cast<double>(n) * rate;
  const int ceil_log2_n = size > 1 ? static_cast<int>(std::ceil(std::log2(static_cast<double>(size)))) : 0;
  const int l_sat = std::max(1, static_cast<int>(std::ceil(nr / kLn2 - 1e-12)));
  // Lengths beyond N - 1 are never needed for unsaturated strings: any prefix
  // tree with N leaves can be pruned to depth N - 1.
  const int unsat_max = std::min(l_sat - 1, std::max(static_cast<int>(size) - 1, 1));
  const int cap = std::min(std::max({ceil_log2_n, l_sat + ceil_log2_n, 1}), 62);
  const std::uint64_t budget = std::uint64_t{1} << cap;

  const auto order = sort_desc(p);
  std::vector<double> q(size);
  for (std::size_t r = 0; r < size; ++r) q[r] = p[order[r]];
  std::vector<double> tail(size + 1, 0.0);
  for (std::size_t r = size; r-- > 0;) tail[r] = tail[r + 1] + q[r];

  auto unit_cost = [&](int l) { return std::exp(rho * std::min(l * kLn2, nr)); };
  const double saturated_cost = unit_cost(cap);

  IntegerOptimum out;
  double best = kInf;
  std::vector<int> current(size, 0);
  std::vector<int> best_lengths;

  auto rec = [&](auto&& self, std::size_t i, int min_len, std::uint64_t used, double cost) -> void {
    ++out.nodes;
    if (i == size) {
      if (cost < best) {
        best = cost;
        best_lengths = current;
      }
      return;
    }
    const std::uint64_t remaining = size - i;
    if (used + remaining <= budget) {
      const double c = cost + tail[i] * saturated_cost;
      if (c < best) {
        best = c;
        best_lengths = current;
        for (std::size_t r = i; r < size; ++r) best_lengths[r] = cap;
      }
    }
    for (int l = min_len; l <= unsat_max; ++l) {
      const double u = unit_cost(l);
      if (cost + tail[i] * u >= best) break;
      const std::uint64_t w = std::uint64_t{1} << (cap - l);
      if (used + w + (remaining - 1) > budget) continue;
      current[i] = l;
      self(self, i + 1, l, used + w, cost + q[i] * u);
    }
  };
  rec(rec, 0, 1, 0, 0.0);

  if (!std::isfinite(best) || best_lengths.empty())
    throw NumericalError("integer_bruteforce: no feasible length vector found");
  out.value = std::log(best) / n;
  out.lengths.assign(size, 0);
  for (std::size_t r = 0; r < size; ++r) out.lengths[order[r]] = best_lengths[r];
  return out;
}

double error_term(std::span<const double> p, unsigned n, double rate) {
  const TopSetSummary s = top_set(p, n, rate, 1.0);
  return s.mass_complement > 0.0 ? std::log(s.mass_complement) / n : -kInf;
}

double correct_decoding_term(std::span<const double> p, unsigned n, double rho, double rate) {
  const TopSetSummary s = top_set(p, n, rate, rho);
  return s.tilted_sum > 0.0 ? (1.0 + rho) * std::log(s.tilted_sum) / n : -kInf;
}

FiniteBound lower_bound_finite(std::span<const double> p, unsigned n, double rho, double rate) {
  const TopSetSummary s = top_set(p, n, rate, rho);
  const double err = s.mass_complement > 0.0 ? rho * rate + std::log(s.mass_complement) / n : -kInf;
  const double cor = s.tilted_sum > 0.0 ? (1.0 + rho) * std::log(s.tilted_sum) / n : -kInf;
  const double ln_n = std::log(static_cast<double>(p.size()));
  return {std::max(err, cor), rho * (kLn2 + std::log1p(ln_n)) / n};
}

FiniteBound upper_bound_finite(std::span<const double> p, unsigned n, double rho, double rate,
                               std::size_t scan_points) {
  check_args(rho, rate, n);
  const double nr = static_cast<double>(n) * rate;
  auto objective = [&](double theta) { return (rho - theta) * nr + scaled_renyi(p, theta); };
  const ScalarMin m = scan_then_golden(objective, 0.0, rho, std::max<std::size_t>(scan_points, 2));
  return {m.value / n + kLn2 / n, kLn2 / n};
}

}  // namespace keyguess
