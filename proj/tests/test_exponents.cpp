#include <doctest.h>

#include <cmath>
#include <random>

#include "keyguess/errors.hpp"
#include "keyguess/exponents.hpp"
#include "oracles.hpp"

using namespace keyguess;
using doctest::Approx;

namespace {
const std::vector<double> kP{0.8, 0.2};
}  // namespace

TEST_CASE("dual exponent examples") {
  CHECK(iid_exponent_dual(kP, 1.0, 0.3) == Approx(0.3).epsilon(1e-12));
  const double full = oracle::renyi(kP, 0.5);
  CHECK(iid_exponent_dual(kP, 1.0, 1.0) == Approx(full).epsilon(1e-10));
  CHECK(iid_exponent_dual(kP, 1.0, 1.0) == Approx(0.587786665).epsilon(1e-8));
  const auto d = iid_exponent_dual_detail(kP, 1.0, 0.3);
  CHECK(d.theta == Approx(0.0));
  CHECK(iid_exponent_dual(std::vector<double>{0.25, 0.25, 0.25, 0.25}, 2.0, 5.0) ==
        Approx(2 * std::log(4.0)).epsilon(1e-10));
}

TEST_CASE("dual matches the primal on binary sources") {
  for (double p0 : {0.55, 0.7, 0.8, 0.95})
    for (double rho : {0.5, 1.0, 2.0})
      for (double rate : {0.1, 0.3, 0.5, 0.6, 0.8}) {
        const double dual = iid_exponent_dual(std::vector<double>{p0, 1 - p0}, rho, rate);
        CHECK(dual == Approx(oracle::binary_exponent_grid(p0, rho, rate)).epsilon(1e-7));
      }
}

TEST_CASE("simplex grid agrees with the dual") {
  const auto g = iid_exponent_grid(kP, 1.0, 0.6);
  CHECK(g.value == Approx(iid_exponent_dual(kP, 1.0, 0.6)).epsilon(1e-8));
  CHECK(g.grid_value <= g.value + 1e-12);
  std::mt19937_64 rng(71);
  for (int t = 0; t < 6; ++t) {
    const auto p = oracle::random_pmf(rng, 3, 0.05);
    const double rate = 0.2 + 0.15 * t;
    const auto grid = iid_exponent_grid(p, 1.0, rate);
    const double dual = iid_exponent_dual(p, 1.0, rate);
    CHECK(std::abs(grid.value - dual) <= 2e-3);
    CHECK(std::abs(oracle::ternary_exponent_grid(p, 1.0, rate, 400) - dual) <= 2e-3);
  }
  CHECK_THROWS_AS(iid_exponent_grid(std::vector<double>(5, 0.2), 1.0, 0.5), SizeError);
}

TEST_CASE("error exponent") {
  CHECK(iid_error_exponent(kP, 0.3) == 0.0);
  CHECK(iid_error_exponent(kP, std::log(2.0)) == INFINITY);
  // binary: the constraint H(Q) > R binds at the root closer to P
  const double rate = 0.6;
  double best = INFINITY;
  for (int i = 0; i <= 10000; ++i) {
    const double q = 0.5 + 0.5 * i / 10000.0;
    if (oracle::entropy({q, 1 - q}) > rate) best = std::min(best, oracle::divergence({q, 1 - q}, kP));
  }
  CHECK(iid_error_exponent(kP, rate) == Approx(best).epsilon(1e-3));
  CHECK(iid_error_exponent(kP, rate) == Approx(0.021859).epsilon(1e-4));
  CHECK(iid_error_exponent(std::vector<double>{0.6, 0.4, 0.0}, 0.7) == INFINITY);
}

TEST_CASE("correct-decoding term") {
  for (double rate : {0.05, 0.2, 0.4, 0.6}) {
    double best = -INFINITY;
    for (int i = 0; i <= 20000; ++i) {
      const double q = i / 20000.0;
      const oracle::Vec qq{q, 1 - q};
      if (oracle::entropy(qq) <= rate) best = std::max(best, oracle::entropy(qq) - oracle::divergence(qq, kP));
    }
    CHECK(iid_correct_term(kP, 1.0, rate) == Approx(best).epsilon(1e-4));
  }
  CHECK(iid_correct_term(kP, 1.0, 1.0) == Approx(oracle::renyi(kP, 0.5)).epsilon(1e-10));
}

TEST_CASE("error / correct-decoding decomposition") {
  std::mt19937_64 rng(73);
  for (int t = 0; t < 30; ++t) {
    const auto p = oracle::random_pmf(rng, 2 + t % 5);
    const auto d = decomposition_check(p, 0.5 + 0.1 * t, 0.05 + 0.05 * t);
    CHECK(d.gap <= 1e-8);
  }
}

TEST_CASE("markov exponent") {
  const StochasticMatrix iid({{0.8, 0.2}, {0.8, 0.2}});
  for (double rate : {0.3, 0.5, 0.6, 1.0})
    CHECK(markov_exponent(iid, 1.0, rate).value == Approx(iid_exponent_dual(kP, 1.0, rate)).epsilon(1e-9));
  const StochasticMatrix chain({{0.9, 0.1}, {0.3, 0.7}});
  const std::vector<double> flat{0.9, 0.1, 0.3, 0.7};
  for (double rate : {0.2, 0.4, 0.6}) {
    const double dual = markov_exponent(chain, 1.0, rate).value;
    CHECK(std::abs(oracle::markov2_grid(flat, 1.0, rate, 1000) - dual) <= 1e-3);
    const auto g = markov_exponent_grid(chain, 1.0, rate, 1e-2);
    CHECK(g.value <= dual + 1e-9);
    CHECK(dual - g.value <= 2e-3);
  }
}

TEST_CASE("thresholds") {
  const auto th = thresholds(kP, 1.0);
  CHECK(th.h_p == Approx(oracle::entropy(kP)));
  CHECK(th.e_max == Approx(oracle::renyi(kP, 0.5)));
  CHECK(th.h_prime == Approx(0.636504).epsilon(1e-5));
  CHECK(iid_exponent_dual(kP, 1.0, th.h_prime) == Approx(th.e_max).epsilon(1e-8));
  CHECK(iid_exponent_dual(kP, 1.0, th.h_prime - 1e-3) < th.e_max - 1e-7);
  CHECK(iid_exponent_dual(kP, 1.0, th.h_p) == Approx(th.h_p).epsilon(1e-9));
}

TEST_CASE("perfect secrecy and the curve") {
  const SourceModel m = IidSource{Pmf(kP)};
  CHECK(perfect_secrecy_exponent(m, 1.0).value == Approx(oracle::renyi(kP, 0.5)));
  std::vector<double> rates;
  for (int i = 1; i <= 30; ++i) rates.push_back(0.03 * i);
  const auto c = exponent_curve(m, 1.0, rates);
  double prev = 0.0;
  for (const auto& s : c.samples) {
    CHECK(s.value >= prev - 1e-12);
    CHECK(s.value <= s.rate + 1e-12);
    CHECK(s.value <= c.e_max + 1e-12);
    if (s.rate < c.h_p - 1e-6) CHECK(s.branch == Branch::kLinear);
    if (s.rate > c.h_prime + 1e-6) CHECK(s.branch == Branch::kSaturated);
    prev = s.value;
  }
  for (std::size_t i = 2; i < c.samples.size(); ++i) {
    const double d2 = c.samples[i].value - 2 * c.samples[i - 1].value + c.samples[i - 2].value;
    CHECK(d2 <= 1e-9);
  }
}

TEST_CASE("legendre-fenchel transform") {
  std::vector<double> rhos, lin, quad;
  for (int i = 1; i <= 100; ++i) {
    rhos.push_back(0.04 * i);
    lin.push_back(0.5 * rhos.back());
    quad.push_back(0.5 * rhos.back() * rhos.back());
  }
  const std::vector<double> lambdas{0.2, 0.5, 1.0, 2.0};
  const auto l = legendre_fenchel(rhos, lin, lambdas);
  CHECK(l[0].value == Approx(0.0));
  CHECK_FALSE(l[0].at_boundary);
  CHECK(l[1].value == Approx(0.0));
  CHECK(l[2].at_boundary);
  const auto q = legendre_fenchel(rhos, quad, lambdas);
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    CHECK(q[i].value == Approx(0.5 * lambdas[i] * lambdas[i]).epsilon(1e-3));
    CHECK(std::abs(q[i].argmax - lambdas[i]) <= 0.04 + 1e-12);
  }
  auto bumpy = quad;
  bumpy[50] += 0.1;
  CHECK_THROWS_AS(legendre_fenchel(rhos, bumpy, lambdas), DataError);
  CHECK_THROWS_AS(legendre_fenchel(std::vector<double>{1, 2}, std::vector<double>{1, 2}, lambdas),
                  DomainError);
}

TEST_CASE("transform of the guessing exponent") {
  std::vector<double> rhos, values;
  for (int i = 1; i <= 80; ++i) {
    rhos.push_back(0.05 * i);
    values.push_back(iid_exponent_dual(kP, rhos.back(), 0.6));
  }
  const auto lf = legendre_fenchel(rhos, values, std::vector<double>{0.3, 0.55});
  CHECK(lf[0].value >= 0.0);
  CHECK(lf[0].value <= lf[1].value);
}

TEST_CASE("variational identity") {
  std::mt19937_64 rng(79);
  for (int t = 0; t < 20; ++t) {
    const auto p = oracle::random_pmf(rng, 8);
    std::vector<std::size_t> b;
    for (std::size_t i = 0; i < 8; ++i)
      if (rng() % 2 || b.empty()) b.push_back(i);
    const double theta = 0.1 + 0.2 * t;
    const auto v = variational_identity_check(p, theta, b, t, 200);
    CHECK(v.lhs == Approx(oracle::subset_renyi_lhs(p, b, theta)).epsilon(1e-12));
    CHECK(v.gap <= 1e-10);
    CHECK(v.max_excess <= 1e-10);
  }
}
