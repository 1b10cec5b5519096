#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "keyguess/cipher.hpp"
#include "keyguess/compression.hpp"
#include "keyguess/errors.hpp"
#include "keyguess/io.hpp"
#include "oracles.hpp"

using namespace keyguess;
using doctest::Approx;

namespace {

const std::vector<double> kP4{0.4, 0.3, 0.2, 0.1};

// Every table over N messages with M keys, no symmetry reduction.
template <class Visit>
void all_tables(std::size_t n, std::size_t m, Visit visit) {
  std::vector<std::uint32_t> id(n);
  std::iota(id.begin(), id.end(), 0u);
  std::vector<std::vector<std::uint32_t>> perms;
  do perms.push_back(id);
  while (std::next_permutation(id.begin(), id.end()));
  std::vector<std::size_t> idx(m, 0);
  while (true) {
    std::vector<std::vector<std::uint32_t>> t;
    for (std::size_t u = 0; u < m; ++u) t.push_back(perms[idx[u]]);
    visit(t);
    std::size_t i = 0;
    while (i < m && ++idx[i] == perms.size()) idx[i++] = 0;
    if (i == m) break;
  }
}

}  // namespace

TEST_CASE("cipher spec") {
  const auto s = CipherSpec::make(3, 2, 10);
  CHECK(s.num_keys == 4);
  CHECK(s.num_messages == 12);
  CHECK(s.key_rate == Approx(2 * std::log(2.0) / 3));
  CHECK(key_bits_for_rate(1, std::log(2.0)) == 1);
  CHECK(key_bits_for_rate(8, 0.3) == 4);
  CHECK(key_bits_for_rate(2, 0.01) == 1);
}

TEST_CASE("cipher rejects non-bijective tables") {
  const auto s = CipherSpec::make(1, 1, 2);
  CHECK_THROWS_AS(Cipher(s, {{0, 1}, {1, 1}}), ValidationError);
  CHECK_THROWS_AS(Cipher(s, {{0, 1}}), ValidationError);
}

TEST_CASE("group-XOR construction") {
  const auto c = build_group_xor_cipher(kP4, 1);
  CHECK(c.encrypt(0, 1) == 1);
  CHECK(c.encrypt(1, 1) == 0);
  CHECK(c.encrypt(2, 1) == 3);
  CHECK(c.encrypt(3, 1) == 2);
  for (std::uint32_t m = 0; m < 4; ++m) CHECK(c.encrypt(m, 0) == m);
  const auto id = build_group_xor_cipher(kP4, 0);
  CHECK(id.num_keys() == 1);
  CHECK(build_group_xor_cipher(std::vector<double>{0.5, 0.3, 0.2}, 1).num_messages() == 4);
  // messages re-indexed by decreasing probability
  const auto r = build_group_xor_cipher(std::vector<double>{0.1, 0.4, 0.2, 0.3}, 1);
  CHECK(r.encrypt(1, 0) == 0);
  CHECK(r.encrypt(3, 0) == 1);
  CHECK(r.encrypt(1, 1) == 1);
}

TEST_CASE("optimal attack on group-XOR guesses within the group") {
  const std::vector<double> p{0.3, 0.25, 0.2, 0.1, 0.08, 0.07};
  const auto c = build_group_xor_cipher(p, 1);
  for (std::size_t y = 0; y < c.num_messages(); ++y) {
    const auto seq = optimal_attack(c, p, y).sequence();
    const std::size_t j = y / 2;
    CHECK(seq[0] == 2 * j);
    CHECK(seq[1] == 2 * j + 1);
  }
  const auto id = build_group_xor_cipher(kP4, 0);
  CHECK(optimal_attack(id, kP4, 2).sequence() == std::vector<std::size_t>{2, 0, 1, 3});
}

TEST_CASE("attack moment examples") {
  CHECK(attack_moment(build_group_xor_cipher(kP4, 0), kP4, 1.0) == Approx(1.0));
  CHECK(moment(GuessOrder::from_sequence(sort_desc(kP4)), kP4, 1.0) == Approx(2.0));
  CHECK(attack_moment(build_group_xor_cipher(kP4, 1), kP4, 1.0) == Approx(1.4));
  CHECK(group_xor_moment_closed(kP4, 1, 1.0) == Approx(1.4));
  CHECK(group_xor_moment_closed(std::vector<double>(4, 0.25), 1, 1.0) == Approx(1.5));
  CHECK(group_xor_moment_closed(kP4, 3, 1.0) == Approx(2.0));
  const std::vector<double> point{0.0, 1.0, 0.0, 0.0};
  for (unsigned k = 0; k <= 2; ++k) {
    const double m = attack_moment(build_group_xor_cipher(point, k), point, 2.0);
    CHECK(m >= 1.0);
    CHECK(m <= std::pow(2.0, 2.0 * k));
  }
}

TEST_CASE("closed form equals the exact attack moment") {
  std::mt19937_64 rng(29);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng() % 64;
    const unsigned k = static_cast<unsigned>(rng() % 5);
    const double rho = 0.2 + (rng() % 40) / 10.0;
    const auto p = oracle::random_pmf(rng, n);
    const auto c = build_group_xor_cipher(p, k);
    const double exact = attack_moment(c, p, rho);
    CHECK(exact == Approx(group_xor_moment_closed(p, k, rho)).epsilon(1e-12));
    CHECK(exact == Approx(oracle::attack_moment(c.table(), p, rho)).epsilon(1e-12));
  }
}

TEST_CASE("optimal attacker beats other per-cryptogram orders") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 4 + rng() % 12;
    const auto p = oracle::random_pmf(rng, n);
    const auto c = build_group_xor_cipher(p, 2);
    const double best = attack_moment(c, p, 1.0);
    const double other = attack_moment_with(c, p, 1.0, [&](std::size_t) {
      std::vector<std::size_t> s(c.num_messages());
      std::iota(s.begin(), s.end(), 0);
      std::shuffle(s.begin(), s.end(), rng);
      return GuessOrder::from_sequence(s);
    });
    CHECK(best <= other * (1 + 1e-12));
    const double same = attack_moment_with(c, p, 1.0, [&](std::size_t y) { return optimal_attack(c, p, y); });
    CHECK(same == Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("attack moment is invariant under posterior ties") {
  const std::vector<double> p(6, 1.0 / 6);
  const auto a = build_group_xor_cipher(p, 1);
  const double m = attack_moment(a, p, 1.0);
  CHECK(m == Approx(1.5));
  const double reversed = attack_moment_with(a, p, 1.0, [&](std::size_t y) {
    auto s = optimal_attack(a, p, y).sequence();
    std::reverse(s.begin(), s.begin() + 2);
    return GuessOrder::from_sequence(s);
  });
  CHECK(reversed == Approx(m));
}

TEST_CASE("brute-force best cipher matches full enumeration") {
  std::mt19937_64 rng(37);
  for (const auto& [n, k] : std::vector<std::pair<std::size_t, unsigned>>{{3, 1}, {4, 1}, {3, 2}}) {
    const auto p = oracle::random_pmf(rng, n);
    double full = 0.0;
    all_tables(n, std::size_t{1} << k,
               [&](const auto& t) { full = std::max(full, oracle::attack_moment(t, p, 1.0)); });
    const auto bf = brute_force_best_cipher(p, k, 1.0);
    CHECK(bf.max_moment == Approx(full).epsilon(1e-12));
    CHECK(oracle::attack_moment(bf.witness.table(), p, 1.0) == Approx(bf.max_moment).epsilon(1e-12));
  }
}

TEST_CASE("brute-force examples") {
  const auto none = brute_force_best_cipher(kP4, 0, 1.0);
  CHECK(none.max_moment == Approx(1.0));
  const std::vector<double> u(4, 0.25);
  CHECK(brute_force_best_cipher(u, 1, 1.0).max_moment == Approx(group_xor_moment_closed(u, 1, 1.0)));
  const std::vector<double> p{0.5, 0.3, 0.2};
  const double v = brute_force_best_cipher(p, 1, 1.0).max_moment;
  CHECK(v >= attack_moment(build_group_xor_cipher(p, 1), p, 1.0) - 1e-12);
  const double c = harmonic_number(3);
  const double relaxed = std::exp(relaxed_optimum(p, 1, 1.0, std::log(2.0)).value);
  CHECK(v <= 2 * c * 3.0 * relaxed);
  CHECK_THROWS_AS(brute_force_best_cipher(std::vector<double>(6, 1.0 / 6), 1, 1.0), SizeError);
  CHECK_THROWS_AS(brute_force_best_cipher(kP4, 3, 1.0), SizeError);
}

TEST_CASE("permutation cipher enumeration counts") {
  std::size_t count = 0;
  for_each_permutation_cipher(3, 1, [&](const Cipher&) { ++count; });
  CHECK(count == 36);
  CHECK_THROWS_AS(for_each_permutation_cipher(5, 1, [](const Cipher&) {}), SizeError);
}

TEST_CASE("achieved exponent and equivalence slack") {
  const IidSource src{Pmf({0.8, 0.2})};
  const auto a = guessing_exponent_achieved(src, 8, 1.0, 0.3);
  CHECK(a.key_bits == 4);
  const auto p = materialize(src, 8);
  const double es = relaxed_optimum(p.probs(), 8, 1.0, 0.3).value;
  CHECK(std::abs(a.value - es) <= a.equivalence_slack);
  // key covering the message space: unconditional optimal guessing
  const auto full = guessing_exponent_achieved(src, 3, 1.0, std::log(2.0) * (1 + 1.0 / 3));
  const auto q = materialize(src, 3);
  CHECK(std::exp(full.log_moment) == Approx(moment(GuessOrder::from_sequence(sort_desc(q)), q.probs(), 1.0)));
}

TEST_CASE("cipher json round trip") {
  const auto c = build_group_xor_cipher(kP4, 1);
  const auto back = cipher_from_json(cipher_to_json(c));
  CHECK(back.table() == c.table());
  CHECK(back.spec().key_bits == 1);
}
