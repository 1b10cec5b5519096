#include "keyguess/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <type_traits>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "keyguess/errors.hpp"
#include "keyguess/kernels.hpp"

namespace keyguess {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_rho_rate(double rho, double rate) {
  if (!(rho > 0.0)) throw DomainError("rho must be positive");
  if (!(rate > 0.0)) throw DomainError("rate R must be positive");
}

std::vector<std::size_t> support_of(std::span<const double> p) {
  std::vector<std::size_t> s;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) s.push_back(i);
  return s;
}

// p^beta normalized on the support of p, formed in the log domain so that
// large beta does not underflow.
std::vector<double> tilted_family(std::span<const double> p, double beta) {
  double hi = -kInf;
  for (double v : p)
    if (v > 0.0) hi = std::max(hi, beta * std::log(v));
  std::vector<double> q(p.size(), 0.0);
  CompensatedSum z;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) {
      q[i] = std::exp(beta * std::log(p[i]) - hi);
      z.add(q[i]);
    }
  for (double& v : q) v /= z.value();
  return q;
}

double iid_objective(std::span<const double> q, std::span<const double> p, double rho,
                     double rate) {
  return rho * std::min(entropy(q), rate) - divergence(q, p);
}

// All compositions of `total` into `parts` nonnegative integers, in
// lexicographic order.
std::vector<std::vector<int>> compositions(int total, std::size_t parts) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(parts, 0);
  auto rec = [&](auto&& self, std::size_t i, int left) -> void {
    if (i + 1 == parts) {
      cur[i] = left;
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cur[i] = v;
      self(self, i + 1, left - v);
    }
  };
  if (parts == 0) return out;
  rec(rec, 0, total);
  return out;
}

double binomial(double n, double k) {
  return std::exp(std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1));
}

struct NmContext {
  std::span<const double> p_support;
  double rho;
  double rate;
};

std::vector<double> softmax_point(const gsl_vector* z, std::size_t d) {
  std::vector<double> q(d);
  double hi = 0.0;
  for (std::size_t i = 0; i + 1 < d; ++i) hi = std::max(hi, gsl_vector_get(z, i));
  double sum = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    q[i] = std::exp((i + 1 < d ? gsl_vector_get(z, i) : 0.0) - hi);
    sum += q[i];
  }
  for (double& v : q) v /= sum;
  return q;
}

double nm_negative_objective(const gsl_vector* z, void* params) {
  const auto* ctx = static_cast<const NmContext*>(params);
  const auto q = softmax_point(z, ctx->p_support.size());
  return -iid_objective(q, ctx->p_support, ctx->rho, ctx->rate);
}

}  // namespace

DualResult dual_minimize(const std::function<double(double)>& phi, double rho, double rate,
                         std::size_t scan_points) {
  check_rho_rate(rho, rate);
  const ScalarMin m = scan_then_golden(
      [&](double theta) { return (rho - theta) * rate + phi(theta); }, 0.0, rho, scan_points);
  return {m.value, m.x, m.unimodal};
}

DualResult iid_exponent_dual_detail(std::span<const double> p1, double rho, double rate) {
  return dual_minimize([&](double theta) { return scaled_renyi(p1, theta); }, rho, rate);
}

double iid_exponent_dual(std::span<const double> p1, double rho, double rate) {
  return iid_exponent_dual_detail(p1, rho, rate).value;
}

GridResult iid_exponent_grid(std::span<const double> p1, double rho, double rate, double step) {
  check_rho_rate(rho, rate);
  if (p1.size() > kGridMaxAlphabet)
    throw SizeError("iid_exponent_grid: alphabet larger than " + std::to_string(kGridMaxAlphabet) +
                    "; use the dual");
  if (!(step > 0.0 && step <= 1.0)) throw DomainError("iid_exponent_grid: step must be in (0, 1]");
  const auto support = support_of(p1);
  const std::size_t d = support.size();
  std::vector<double> ps(d);
  for (std::size_t i = 0; i < d; ++i) ps[i] = p1[support[i]];

  GridResult out;
  auto expand = [&](const std::vector<double>& qs) {
    std::vector<double> q(p1.size(), 0.0);
    for (std::size_t i = 0; i < d; ++i) q[support[i]] = qs[i];
    return q;
  };
  if (d == 1) {
    out.value = out.grid_value = 0.0;
    out.argmax = expand({1.0});
    out.step = step;
    out.points = 1;
    return out;
  }

  const int total = static_cast<int>(std::llround(1.0 / step));
  out.step = 1.0 / total;
  const auto grid = compositions(total, d);
  out.points = grid.size();
  auto point = [&](std::size_t i) {
    std::vector<double> q(d);
    for (std::size_t j = 0; j < d; ++j) q[j] = static_cast<double>(grid[i][j]) / total;
    return q;
  };
  const ArgMin best = kernels::omp::argmin(
      grid.size(), [&](std::size_t i) { return -iid_objective(point(i), ps, rho, rate); });
  out.grid_value = -best.value;
  std::vector<double> best_q = point(best.index);

  // Nelder-Mead on softmax coordinates from the best grid point.
  NmContext ctx{ps, rho, rate};
  gsl_multimin_function fn{&nm_negative_objective, d - 1, &ctx};
  gsl_vector* x = gsl_vector_alloc(d - 1);
  gsl_vector* ss = gsl_vector_alloc(d - 1);
  const double floor_q = 1e-9;
  for (std::size_t i = 0; i + 1 < d; ++i)
    gsl_vector_set(x, i, std::log(std::max(best_q[i], floor_q) / std::max(best_q[d - 1], floor_q)));
  gsl_vector_set_all(ss, 0.05);
  gsl_multimin_fminimizer* s =
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, d - 1);
  gsl_multimin_fminimizer_set(s, &fn, x, ss);
  for (int it = 0; it < 5000; ++it) {
    if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), 1e-11) == GSL_SUCCESS) break;
  }
  const double refined = -gsl_multimin_fminimizer_minimum(s);
  const auto refined_q = softmax_point(gsl_multimin_fminimizer_x(s), d);
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(ss);
  gsl_vector_free(x);

  if (std::isfinite(refined) && refined > out.grid_value) {
    out.value = refined;
    out.argmax = expand(refined_q);
  } else {
    out.value = out.grid_value;
    out.argmax = expand(best_q);
  }
  return out;
}

double iid_error_exponent(std::span<const double> p1, double rate) {
  if (!(rate > 0.0)) throw DomainError("rate R must be positive");
  const std::size_t s = support_of(p1).size();
  if (rate >= std::log(static_cast<double>(s))) return kInf;
  if (rate <= entropy(p1)) return 0.0;
  const double beta = bisect_root(
      [&](double b) { return entropy(tilted_family(p1, b)) - rate; }, 0.0, 1.0);
  return divergence(tilted_family(p1, beta), p1);
}

double iid_correct_term(std::span<const double> p1, double rho, double rate) {
  check_rho_rate(rho, rate);
  const double beta_rho = 1.0 / (1.0 + rho);
  if (rate >= entropy(tilted_family(p1, beta_rho))) return scaled_renyi(p1, rho);

  double p_max = 0.0;
  for (double v : p1) p_max = std::max(p_max, v);
  std::size_t modes = 0;
  for (double v : p1)
    if (v == p_max) ++modes;
  const double floor_entropy = std::log(static_cast<double>(modes));
  // Below the entropy of the uniform law on the modes, any Q on the modes with
  // H(Q) = R is optimal.
  if (rate <= floor_entropy + 1e-13) return (1.0 + rho) * rate + std::log(p_max);

  auto excess = [&](double b) { return entropy(tilted_family(p1, b)) - rate; };
  double hi = 1.0;
  while (excess(hi) > 0.0 && hi < 1e8) hi *= 2.0;
  if (excess(hi) > 0.0) return (1.0 + rho) * rate + std::log(p_max);
  const double beta = bisect_root(excess, beta_rho, hi);
  return rho * rate - divergence(tilted_family(p1, beta), p1);
}

Decomposition decomposition_check(std::span<const double> p1, double rho, double rate) {
  Decomposition d;
  const double err = iid_error_exponent(p1, rate);
  const double first = std::isinf(err) ? -kInf : rho * rate - err;
  d.lhs = std::max(first, iid_correct_term(p1, rho, rate));
  d.rhs = iid_exponent_dual(p1, rho, rate);
  d.gap = std::abs(d.lhs - d.rhs);
  return d;
}

DualResult markov_exponent(const StochasticMatrix& pi, double rho, double rate) {
  if (!is_irreducible(pi)) throw ValidationError("markov_exponent: transition matrix is reducible");
  return dual_minimize([&](double theta) { return markov_scaled_renyi_rate(pi, theta); }, rho,
                       rate);
}

MarkovGrid markov_exponent_grid(const StochasticMatrix& pi, double rho, double rate, double step) {
  check_rho_rate(rho, rate);
  const std::size_t k = pi.size();
  if (k > kGridMaxAlphabet)
    throw SizeError("markov_exponent_grid: alphabet larger than " +
                    std::to_string(kGridMaxAlphabet));
  if (!is_irreducible(pi)) throw ValidationError("markov_exponent_grid: reducible chain");
  if (!(step > 0.0 && step <= 1.0)) throw DomainError("markov_exponent_grid: step must be in (0, 1]");

  int total = static_cast<int>(std::llround(1.0 / step));
  while (total > 1 && std::pow(binomial(total + k - 1.0, k - 1.0), static_cast<double>(k)) >
                          static_cast<double>(kMarkovGridMaxPoints))
    --total;
  const auto rows = compositions(total, k);
  std::size_t count = 1;
  for (std::size_t i = 0; i < k; ++i) count *= rows.size();

  MarkovGrid out;
  out.step = 1.0 / total;
  auto eta_of = [&](std::size_t idx) {
    std::vector<double> eta(k * k);
    for (std::size_t i = 0; i < k; ++i) {
      const auto& r = rows[idx % rows.size()];
      idx /= rows.size();
      for (std::size_t j = 0; j < k; ++j) eta[i * k + j] = static_cast<double>(r[j]) / total;
    }
    return eta;
  };

  std::vector<double> values(count, -kInf);
  kernels::omp::for_each_index(count, [&](std::size_t idx) {
    const auto eta = eta_of(idx);
    for (std::size_t i = 0; i < k * k; ++i)
      if (eta[i] > 0.0 && pi(i / k, i % k) <= 0.0) return;
    if (!is_irreducible(eta, k)) return;
    std::vector<std::vector<double>> m(k, std::vector<double>(k));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) m[i][j] = eta[i * k + j];
    const Pmf q = stationary(StochasticMatrix(std::move(m)));
    double h = 0.0;
    double d = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const std::span<const double> row(eta.data() + i * k, k);
      h += q[i] * entropy(row);
      d += q[i] * divergence(row, pi.row(i));
    }
    values[idx] = rho * std::min(h, rate) - d;
  });

  std::size_t best = 0;
  for (std::size_t idx = 0; idx < count; ++idx) {
    if (values[idx] > -kInf) ++out.points;
    if (values[idx] > values[best]) best = idx;
  }
  out.value = values[best];
  out.eta = eta_of(best);
  return out;
}

RateValue scaled_renyi_rate(const SourceModel& model, double theta) {
  return std::visit(
      [&](const auto& m) -> RateValue {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, IidSource>) {
          return {scaled_renyi(m.marginal.probs(), theta), true, 0};
        } else if constexpr (std::is_same_v<T, MarkovSource>) {
          return {markov_scaled_renyi_rate(m.transition, theta), true, 0};
        } else if constexpr (std::is_same_v<T, UnifilarSource>) {
          return {unifilar_scaled_renyi_rate(m, theta), true, 0};
        } else {
          if (m.pmfs.empty()) throw ValidationError("explicit model lists no PMFs");
          const auto n = static_cast<unsigned>(m.pmfs.size());
          return {scaled_renyi(m.pmfs.back().probs(), theta) / n, false, n};
        }
      },
      model);
}

RateValue entropy_rate(const SourceModel& model) {
  return std::visit(
      [&](const auto& m) -> RateValue {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, IidSource>) {
          return {entropy(m.marginal), true, 0};
        } else if constexpr (std::is_same_v<T, MarkovSource>) {
          return {markov_entropy_rate(m.transition), true, 0};
        } else if constexpr (std::is_same_v<T, UnifilarSource>) {
          return {unifilar_entropy_rate(m), true, 0};
        } else {
          if (m.pmfs.empty()) throw ValidationError("explicit model lists no PMFs");
          const auto n = static_cast<unsigned>(m.pmfs.size());
          return {entropy(m.pmfs.back()) / n, false, n};
        }
      },
      model);
}

double max_entropy_rate(const SourceModel& model) {
  if (const auto* e = std::get_if<ExplicitSource>(&model)) {
    if (e->pmfs.empty()) throw ValidationError("explicit model lists no PMFs");
    return std::log(static_cast<double>(e->pmfs.back().size())) / e->pmfs.size();
  }
  return std::log(static_cast<double>(alphabet_size(model)));
}

DualResult exponent_dual(const SourceModel& model, double rho, double rate) {
  if (const auto* m = std::get_if<MarkovSource>(&model))
    if (!is_irreducible(m->transition))
      throw ValidationError("exponent: transition matrix is reducible");
  return dual_minimize([&](double theta) { return scaled_renyi_rate(model, theta).value; }, rho,
                       rate);
}

RateValue perfect_secrecy_exponent(const SourceModel& model, double rho) {
  if (!(rho > 0.0)) throw DomainError("rho must be positive");
  return scaled_renyi_rate(model, rho);
}

namespace {

Thresholds find_thresholds(double h_p, double e_max, double upper,
                           const std::function<double(double)>& dual) {
  Thresholds t{h_p, h_p, e_max};
  const double target = e_max - 1e-9;
  auto saturated = [&](double r) { return r > 0.0 && dual(r) >= target; };
  if (h_p <= 0.0 || saturated(h_p)) return t;
  double lo = h_p;
  double hi = std::max(upper, h_p);
  while (!saturated(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw NumericalError("thresholds: saturation rate not found");
  }
  while (hi - lo > 1e-12 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    (saturated(mid) ? hi : lo) = mid;
  }
  t.h_prime = hi;
  return t;
}

}  // namespace

Thresholds thresholds(std::span<const double> p1, double rho) {
  if (!(rho > 0.0)) throw DomainError("rho must be positive");
  return find_thresholds(entropy(p1), scaled_renyi(p1, rho),
                         std::log(static_cast<double>(support_of(p1).size())),
                         [&](double r) { return iid_exponent_dual(p1, rho, r); });
}

Thresholds thresholds(const SourceModel& model, double rho) {
  if (!(rho > 0.0)) throw DomainError("rho must be positive");
  return find_thresholds(entropy_rate(model).value, scaled_renyi_rate(model, rho).value,
                         max_entropy_rate(model),
                         [&](double r) { return exponent_dual(model, rho, r).value; });
}

std::string to_string(Branch b) {
  switch (b) {
    case Branch::kLinear: return "linear";
    case Branch::kInterior: return "interior";
    case Branch::kSaturated: return "saturated";
  }
  return "unknown";
}

ExponentCurve exponent_curve(const SourceModel& model, double rho, std::span<const double> rates) {
  ExponentCurve c;
  c.rho = rho;
  const Thresholds t = thresholds(model, rho);
  c.h_p = t.h_p;
  c.h_prime = t.h_prime;
  c.e_max = t.e_max;
  c.asymptotic = entropy_rate(model).asymptotic;
  c.samples.resize(rates.size());
  kernels::omp::for_each_index(rates.size(), [&](std::size_t i) {
    const DualResult d = exponent_dual(model, rho, rates[i]);
    Branch b = Branch::kInterior;
    if (rates[i] <= t.h_p) b = Branch::kLinear;
    else if (rates[i] >= t.h_prime) b = Branch::kSaturated;
    c.samples[i] = {rates[i], d.value, d.theta, b};
  });
  return c;
}

std::vector<LfSample> legendre_fenchel(std::span<const double> rhos, std::span<const double> values,
                                       std::span<const double> lambdas) {
  if (rhos.size() != values.size()) throw DomainError("legendre_fenchel: size mismatch");
  if (rhos.size() < 64) throw DomainError("legendre_fenchel: need at least 64 rho points");
  std::vector<double> r{0.0};
  std::vector<double> v{0.0};
  for (std::size_t i = 0; i < rhos.size(); ++i) {
    if (!(rhos[i] > r.back())) throw DomainError("legendre_fenchel: rho grid must increase from 0");
    r.push_back(rhos[i]);
    v.push_back(values[i]);
  }
  double prev_slope = -kInf;
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    const double slope = (v[i + 1] - v[i]) / (r[i + 1] - r[i]);
    if (slope < prev_slope - 1e-6)
      throw DataError("legendre_fenchel: input is not convex in rho near rho = " +
                      std::to_string(r[i]));
    prev_slope = std::max(prev_slope, slope);
  }
  std::vector<LfSample> out(lambdas.size());
  for (std::size_t j = 0; j < lambdas.size(); ++j) {
    std::size_t best = 0;
    double best_v = -kInf;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double val = lambdas[j] * r[i] - v[i];
      if (val > best_v) {
        best_v = val;
        best = i;
      }
    }
    out[j] = {lambdas[j], best_v, r[best], best + 1 == r.size()};
  }
  return out;
}

VariationalCheck variational_identity_check(std::span<const double> p, double theta,
                                            std::span<const std::size_t> subset,
                                            std::uint64_t seed, std::size_t trials) {
  if (!(theta >= 0.0)) throw DomainError("variational_identity_check: theta must be nonnegative");
  if (subset.empty()) throw DomainError("variational_identity_check: empty subset");
  std::vector<double> mu;
  mu.reserve(subset.size());
  for (std::size_t i : subset) {
    if (i >= p.size()) throw DomainError("variational_identity_check: index out of range");
    mu.push_back(p[i]);
  }
  double mass = 0.0;
  for (double m : mu) mass += m;
  if (!(mass > 0.0)) throw DomainError("variational_identity_check: subset has zero mass");

  auto objective = [&](std::span<const double> nu) {
    return theta * entropy(nu) - divergence(nu, mu);
  };

  VariationalCheck c;
  c.lhs = scaled_renyi(mu, theta);
  const auto star = tilted_family(mu, 1.0 / (1.0 + theta));
  c.rhs = objective(star);
  c.gap = std::abs(c.lhs - c.rhs);

  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> gamma(1.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> nu(mu.size());
  c.max_excess = -kInf;
  for (std::size_t t = 0; t < trials; ++t) {
    double z = 0.0;
    for (std::size_t i = 0; i < nu.size(); ++i) {
      if (mu[i] <= 0.0) {
        nu[i] = 0.0;
        continue;
      }
      nu[i] = t % 2 == 0 ? gamma(rng) : star[i] * std::exp(0.1 * normal(rng));
      z += nu[i];
    }
    for (double& x : nu) x /= z;
    c.max_excess = std::max(c.max_excess, objective(nu) - c.lhs);
  }
  return c;
}

}  // namespace keyguess
