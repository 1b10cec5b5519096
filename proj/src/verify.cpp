#include "keyguess/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "keyguess/cipher.hpp"
#include "keyguess/compression.hpp"
#include "keyguess/exponents.hpp"
#include "keyguess/guessing.hpp"
#include "keyguess/sources.hpp"

namespace keyguess {
namespace {

constexpr double kLn2 = 0.69314718055994530942;

std::vector<double> random_pmf(std::mt19937_64& rng, std::size_t size) {
  std::gamma_distribution<double> gamma(1.0, 1.0);
  std::vector<double> p(size);
  double z = 0.0;
  for (double& v : p) z += (v = gamma(rng) + 1e-3);
  for (double& v : p) v /= z;
  return p;
}

CheckResult check(std::string name, double tolerance) {
  CheckResult r;
  r.name = std::move(name);
  r.tolerance = tolerance;
  r.worst = 0.0;
  return r;
}

void finish(CheckResult& r) { r.pass = r.worst <= r.tolerance; }

// (1/n) ln of the saturated cost of integer lengths.
double integer_exponent(std::span<const int> lengths, std::span<const double> p, double rho,
                        unsigned n, double rate) {
  return log_saturated_moment(lengths, p, rho, n, rate) / n;
}

}  // namespace

std::vector<CheckResult> run_verification(std::uint64_t seed, double tolerance_scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<CheckResult> out;

  {
    auto gap = check("subset_variational_gap", 1e-9 * tolerance_scale);
    auto excess = check("subset_random_excess", 1e-12 * tolerance_scale);
    auto renyi = check("renyi_variational_gap", 1e-9 * tolerance_scale);
    for (int t = 0; t < 200; ++t) {
      const std::size_t size = 2 + rng() % 63;
      const auto p = random_pmf(rng, size);
      std::vector<std::size_t> subset;
      for (std::size_t i = 0; i < size; ++i)
        if (unit(rng) < 0.5) subset.push_back(i);
      if (subset.empty()) subset.push_back(rng() % size);
      const double theta = 3.0 * unit(rng);
      const auto v = variational_identity_check(p, theta, subset, rng(), 200);
      gap.worst = std::max(gap.worst, v.gap);
      excess.worst = std::max(excess.worst, v.max_excess);
      ++gap.cases;
      ++excess.cases;
      std::vector<std::size_t> all(size);
      for (std::size_t i = 0; i < size; ++i) all[i] = i;
      const auto full = variational_identity_check(p, theta, all, rng(), 0);
      renyi.worst = std::max(renyi.worst, std::abs(full.rhs - theta * renyi_entropy(p, 1.0 / (1.0 + theta))));
      ++renyi.cases;
    }
    finish(gap);
    finish(excess);
    finish(renyi);
    out.push_back(gap);
    out.push_back(excess);
    out.push_back(renyi);
  }

  {
    auto r = check("decomposition_gap", 1e-4);
    for (const std::vector<double>& p : {std::vector<double>{0.8, 0.2}, {0.6, 0.3, 0.1}}) {
      const double top = std::log(static_cast<double>(p.size()));
      for (double rho : {0.5, 1.0, 2.0})
        for (int i = 1; i <= 20; ++i) {
          const auto d = decomposition_check(p, rho, top * 1.2 * i / 20.0);
          r.worst = std::max(r.worst, d.gap);
          ++r.cases;
        }
    }
    finish(r);
    out.push_back(r);
  }

  {
    // Interleaving the optimal-length order with the key list never costs more
    // than 2^rho times the saturated cost, whatever the cipher.
    auto r = check("interleave_chain_violation", 0.0);
    for (std::size_t size = 2; size <= 4; ++size)
      for (double rho : {0.5, 1.0}) {
        const auto p = random_pmf(rng, size);
        const double rate = kLn2;
        const auto opt = integer_bruteforce(p, rho, rate, 1);
        const double bound = std::pow(2.0, rho) * std::exp(log_saturated_moment(opt.lengths, p, rho, 1, rate));
        const GuessOrder first = order_from_lengths(opt.lengths);
        for_each_permutation_cipher(size, 1, [&](const Cipher& c) {
          const double m = attack_moment_with(c, p, rho, [&](std::size_t y) {
            std::vector<std::size_t> keys;
            for (std::size_t u = 0; u < c.num_keys(); ++u) keys.push_back(c.decrypt(y, u));
            return interleave(first, keys);
          });
          r.worst = std::max(r.worst, m / bound - 1.0 - 1e-12);
          ++r.cases;
        });
      }
    r.worst = std::max(r.worst, 0.0);
    finish(r);
    out.push_back(r);
  }

  {
    auto r = check("group_xor_chain_violation", 0.0);
    for (int t = 0; t < 100; ++t) {
      const std::size_t size = 2 + rng() % 63;
      const unsigned k = 1 + static_cast<unsigned>(rng() % 4);
      const double rho = 0.25 + 2.0 * unit(rng);
      const auto p = random_pmf(rng, size);
      const double rate = k * kLn2;
      const double moment = attack_moment(build_group_xor_cipher(p, k), p, rho);
      const auto order = GuessOrder::from_sequence(sort_desc(p));
      const auto lengths = lengths_from_order(order);
      const double c = harmonic_number(size);
      const double bound = std::exp(log_saturated_moment(lengths.lengths(), p, rho, 1, rate)) /
                           (std::pow(2.0 * c, rho) * (2.0 + rho));
      r.worst = std::max(r.worst, bound / moment - 1.0 - 1e-12);
      ++r.cases;
    }
    r.worst = std::max(r.worst, 0.0);
    finish(r);
    out.push_back(r);
  }

  {
    auto r = check("group_xor_closed_form", 1e-12 * tolerance_scale);
    for (int t = 0; t < 100; ++t) {
      const std::size_t size = 1 + rng() % 64;
      const unsigned k = static_cast<unsigned>(rng() % 5);
      const double rho = 0.25 + 2.0 * unit(rng);
      const auto p = random_pmf(rng, size);
      const double a = attack_moment(build_group_xor_cipher(p, k), p, rho);
      const double b = group_xor_moment_closed(p, k, rho);
      r.worst = std::max(r.worst, std::abs(a - b) / b);
      ++r.cases;
    }
    finish(r);
    out.push_back(r);
  }

  {
    // worst = largest excess of |E_s - E_g| over the slack, at either end of
    // the bracket; pass when nonpositive.
    auto r = check("guess_compress_excess", 0.0);
    r.worst = -INFINITY;
    for (int t = 0; t < 20; ++t) {
      const std::size_t size = 2 + rng() % 4;
      const unsigned k = 1 + static_cast<unsigned>(rng() % 2);
      const double rho = t % 2 == 0 ? 0.5 : 1.0;
      const auto p = random_pmf(rng, size);
      const double rate = k * kLn2;
      const double es = integer_bruteforce(p, rho, rate, 1).value;
      const double gx = std::log(attack_moment(build_group_xor_cipher(p, k), p, rho));
      const double bf = std::log(brute_force_best_cipher(p, k, rho).max_moment);
      const double slack = rho * std::log(4.0 * harmonic_number(size)) + std::log(2.0 + rho);
      for (double eg : {gx, bf}) r.worst = std::max(r.worst, std::abs(es - eg) - slack);
      ++r.cases;
    }
    finish(r);
    out.push_back(r);
  }

  {
    auto r = check("integer_relaxed_sandwich", 0.0);
    r.worst = -INFINITY;
    for (int t = 0; t < 50; ++t) {
      const std::size_t size = 1 + rng() % 10;
      const unsigned n = 1 + static_cast<unsigned>(rng() % 3);
      const double rho = 0.25 + 2.0 * unit(rng);
      const double rate = 0.05 + 1.5 * unit(rng);
      const auto p = random_pmf(rng, size);
      const double relaxed = relaxed_optimum(p, n, rho, rate).value;
      const auto integer = integer_bruteforce(p, rho, rate, n);
      const double check_value = integer_exponent(integer.lengths, p, rho, n, rate);
      const double tol = 1e-12;
      r.worst = std::max({r.worst, relaxed - integer.value - tol,
                          integer.value - relaxed - rho * kLn2 / n - tol,
                          std::abs(check_value - integer.value) - 1e-12});
      ++r.cases;
    }
    finish(r);
    out.push_back(r);
  }

  {
    auto r = check("markov_iid_disguise", 1e-9 * tolerance_scale);
    for (const std::vector<double>& p : {std::vector<double>{0.8, 0.2}, {0.6, 0.3, 0.1}}) {
      StochasticMatrix pi(std::vector<std::vector<double>>(p.size(), p));
      for (double rho : {0.5, 1.0, 2.0})
        for (double rate : {0.2, 0.55, 0.9}) {
          r.worst = std::max(r.worst, std::abs(markov_exponent(pi, rho, rate).value -
                                               iid_exponent_dual(p, rho, rate)));
          ++r.cases;
        }
    }
    finish(r);
    out.push_back(r);
  }
  return out;
}

}  // namespace keyguess
