#include "keyguess/sources.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "keyguess/errors.hpp"
#include "keyguess/kernels.hpp"

namespace keyguess {
namespace {

void check_probs(const std::vector<double>& probs, double tolerance) {
  if (probs.empty()) throw ValidationError("pmf: empty");
  CompensatedSum total;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double v = probs[i];
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ValidationError("pmf: entry " + std::to_string(i) + " is negative or not finite");
    }
    total.add(v);
  }
  if (std::abs(total.value() - 1.0) > tolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "pmf: entries sum to " << total.value();
    throw ValidationError(msg.str());
  }
}

std::size_t checked_power(std::size_t base, unsigned n, std::size_t cap) {
  std::size_t out = 1;
  for (unsigned i = 0; i < n; ++i) {
    if (base != 0 && out > cap / base) {
      throw SizeError("materialize: " + std::to_string(base) + "^" + std::to_string(n) +
                      " strings exceeds the cap of " + std::to_string(cap));
    }
    out *= base;
  }
  if (out > cap) throw SizeError("materialize: string count exceeds cap " + std::to_string(cap));
  return out;
}

// Entrywise power of the positive entries; zero stays zero for any exponent.
std::vector<double> entrywise_power(const StochasticMatrix& pi, double alpha) {
  const std::size_t k = pi.size();
  std::vector<double> out(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (pi(i, j) > 0.0) out[i * k + j] = std::pow(pi(i, j), alpha);
  return out;
}

std::vector<double> unifilar_state_matrix(const UnifilarSource& src, double alpha) {
  const std::size_t s = src.num_states;
  std::vector<double> out(s * s, 0.0);
  for (std::size_t from = 0; from < s; ++from)
    for (std::size_t x = 0; x < src.alphabet; ++x) {
      const double e = src.emission[from][x];
      if (e > 0.0) out[from * s + src.next[from][x]] += std::pow(e, alpha);
    }
  return out;
}

StochasticMatrix to_stochastic(const std::vector<double>& flat, std::size_t size) {
  std::vector<std::vector<double>> rows(size, std::vector<double>(size));
  for (std::size_t i = 0; i < size; ++i)
    for (std::size_t j = 0; j < size; ++j) rows[i][j] = flat[i * size + j];
  return StochasticMatrix(std::move(rows), 1e-10);
}

}  // namespace

Pmf::Pmf(std::vector<double> probs, double tolerance)
    : Pmf(std::move(probs), 0, 1, tolerance) {}

Pmf::Pmf(std::vector<double> probs, std::size_t alphabet_size, unsigned block_length,
         double tolerance)
    : probs_(std::move(probs)),
      alphabet_size_(alphabet_size == 0 ? probs_.size() : alphabet_size),
      block_length_(block_length) {
  check_probs(probs_, tolerance);
  if (block_length_ == 0) throw ValidationError("pmf: block length must be positive");
  std::size_t expected = 1;
  for (unsigned i = 0; i < block_length_; ++i) expected *= alphabet_size_;
  if (expected != probs_.size()) {
    throw ValidationError("pmf: size " + std::to_string(probs_.size()) + " does not equal " +
                          std::to_string(alphabet_size_) + "^" + std::to_string(block_length_));
  }
}

Pmf Pmf::uniform(std::size_t size) {
  if (size == 0) throw ValidationError("pmf: empty");
  return Pmf(std::vector<double>(size, 1.0 / static_cast<double>(size)), 1e-9);
}

Pmf Pmf::point_mass(std::size_t size, std::size_t at) {
  if (at >= size) throw ValidationError("pmf: point mass index out of range");
  std::vector<double> v(size, 0.0);
  v[at] = 1.0;
  return Pmf(std::move(v));
}

StochasticMatrix::StochasticMatrix(std::vector<std::vector<double>> rows, double tolerance) {
  size_ = rows.size();
  if (size_ == 0) throw ValidationError("transition matrix: empty");
  entries_.reserve(size_ * size_);
  for (std::size_t i = 0; i < size_; ++i) {
    if (rows[i].size() != size_) throw ValidationError("transition matrix: not square");
    try {
      check_probs(rows[i], tolerance);
    } catch (const ValidationError& e) {
      throw ValidationError("transition matrix row " + std::to_string(i) + ": " + e.what());
    }
    entries_.insert(entries_.end(), rows[i].begin(), rows[i].end());
  }
}

std::vector<std::vector<double>> StochasticMatrix::rows() const {
  std::vector<std::vector<double>> out(size_);
  for (std::size_t i = 0; i < size_; ++i) out[i].assign(row(i).begin(), row(i).end());
  return out;
}

MarkovSource make_markov(StochasticMatrix transition, std::optional<Pmf> init) {
  MarkovSource m;
  m.stationary = !init.has_value();
  m.init = init ? std::move(*init) : stationary(transition);
  m.transition = std::move(transition);
  validate(SourceModel{m});
  return m;
}

UnifilarSource make_unifilar(std::vector<std::vector<std::size_t>> next,
                             std::vector<Pmf> emission, std::optional<Pmf> init) {
  UnifilarSource u;
  u.num_states = next.size();
  u.alphabet = emission.empty() ? 0 : emission.front().size();
  u.next = std::move(next);
  u.emission = std::move(emission);
  if (init) {
    u.init = std::move(*init);
  } else {
    validate(SourceModel{UnifilarSource{u.num_states, u.alphabet, u.next, u.emission,
                                        Pmf::uniform(std::max<std::size_t>(u.num_states, 1))}});
    u.init = stationary(to_stochastic(unifilar_state_matrix(u, 1.0), u.num_states));
  }
  validate(SourceModel{u});
  return u;
}

void validate(const SourceModel& model) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, IidSource>) {
          if (m.marginal.size() == 0) throw ValidationError("iid: empty marginal");
        } else if constexpr (std::is_same_v<T, MarkovSource>) {
          if (m.init.size() != m.transition.size())
            throw ValidationError("markov: init and transition sizes differ");
          if (m.stationary) {
            const Pmf q = stationary(m.transition);
            for (std::size_t i = 0; i < q.size(); ++i)
              if (std::abs(q[i] - m.init[i]) > 1e-10)
                throw ValidationError("markov: init is not the stationary distribution");
          }
        } else if constexpr (std::is_same_v<T, UnifilarSource>) {
          if (m.num_states == 0 || m.alphabet == 0) throw ValidationError("unifilar: empty");
          if (m.next.size() != m.num_states || m.emission.size() != m.num_states)
            throw ValidationError("unifilar: per-state tables have the wrong length");
          for (std::size_t s = 0; s < m.num_states; ++s) {
            if (m.next[s].size() != m.alphabet)
              throw ValidationError("unifilar: next-state map is not total");
            if (m.emission[s].size() != m.alphabet)
              throw ValidationError("unifilar: emission pmf has the wrong size");
            for (std::size_t t : m.next[s])
              if (t >= m.num_states) throw ValidationError("unifilar: next state out of range");
          }
          if (m.init.size() != m.num_states)
            throw ValidationError("unifilar: init has the wrong size");
        } else {
          if (m.alphabet == 0) throw ValidationError("explicit: empty alphabet");
          std::size_t expected = 1;
          for (std::size_t n = 0; n < m.pmfs.size(); ++n) {
            expected *= m.alphabet;
            if (m.pmfs[n].size() != expected)
              throw ValidationError("explicit: pmf for n=" + std::to_string(n + 1) +
                                    " has the wrong size");
          }
        }
      },
      model);
}

std::size_t alphabet_size(const SourceModel& model) {
  return std::visit(
      [](const auto& m) -> std::size_t {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, IidSource>) return m.marginal.size();
        else if constexpr (std::is_same_v<T, MarkovSource>) return m.transition.size();
        else return m.alphabet;
      },
      model);
}

Pmf materialize(const SourceModel& model, unsigned n, std::size_t cap) {
  if (n == 0) throw DomainError("materialize: n must be positive");
  validate(model);
  const std::size_t k = alphabet_size(model);
  checked_power(k, n, cap);

  std::vector<double> probs = std::visit(
      [&](const auto& m) -> std::vector<double> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, IidSource>) {
          const auto& p = m.marginal.values();
          std::vector<double> cur = p;
          for (unsigned step = 1; step < n; ++step)
            cur = kernels::omp::extend(cur, k, [&](std::size_t, std::size_t x) { return p[x]; });
          return cur;
        } else if constexpr (std::is_same_v<T, MarkovSource>) {
          std::vector<double> cur = m.init.values();
          for (unsigned step = 1; step < n; ++step)
            cur = kernels::omp::extend(cur, k, [&](std::size_t i, std::size_t x) {
              return m.transition(i % k, x);
            });
          return cur;
        } else if constexpr (std::is_same_v<T, UnifilarSource>) {
          // joint[string * S + state] = P(x^t, S_t = state)
          const std::size_t s_count = m.num_states;
          std::vector<double> joint(s_count);
          for (std::size_t s = 0; s < s_count; ++s) joint[s] = m.init[s];
          std::size_t strings = 1;
          for (unsigned step = 0; step < n; ++step) {
            std::vector<double> next(strings * k * s_count, 0.0);
            const auto rows = static_cast<std::ptrdiff_t>(strings);
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t r = 0; r < rows; ++r) {
              const auto str = static_cast<std::size_t>(r);
              for (std::size_t s = 0; s < s_count; ++s) {
                const double w = joint[str * s_count + s];
                if (w == 0.0) continue;
                for (std::size_t x = 0; x < k; ++x)
                  next[(str * k + x) * s_count + m.next[s][x]] += w * m.emission[s][x];
              }
            }
            joint = std::move(next);
            strings *= k;
          }
          std::vector<double> out(strings, 0.0);
          for (std::size_t str = 0; str < strings; ++str) {
            CompensatedSum acc;
            for (std::size_t s = 0; s < s_count; ++s) acc.add(joint[str * s_count + s]);
            out[str] = acc.value();
          }
          return out;
        } else {
          if (n > m.pmfs.size())
            throw DomainError("materialize: explicit source has no pmf for n=" +
                              std::to_string(n));
          return m.pmfs[n - 1].values();
        }
      },
      model);
  return Pmf(std::move(probs), k, n, kProductPmfTolerance);
}

double entropy(std::span<const double> p) {
  return kernels::omp::sum(p.size(), [&](std::size_t i) {
    const double v = p[i];
    return v > 0.0 ? -v * std::log(v) : 0.0;
  });
}

double renyi_entropy(std::span<const double> p, double alpha) {
  if (!(alpha > 0.0) || alpha == 1.0 || !std::isfinite(alpha))
    throw DomainError("renyi_entropy: order must be positive and different from 1");
  const double s = kernels::omp::sum(p.size(), [&](std::size_t i) {
    return p[i] > 0.0 ? std::pow(p[i], alpha) : 0.0;
  });
  return std::log(s) / (1.0 - alpha);
}

double scaled_renyi(std::span<const double> p, double theta) {
  if (!(theta >= 0.0)) throw DomainError("scaled_renyi: theta must be nonnegative");
  const double beta = 1.0 / (1.0 + theta);
  const double s = kernels::omp::sum(p.size(), [&](std::size_t i) {
    return p[i] > 0.0 ? std::pow(p[i], beta) : 0.0;
  });
  return (1.0 + theta) * std::log(s);
}

double divergence(std::span<const double> q, std::span<const double> p) {
  if (q.size() != p.size()) throw DomainError("divergence: index sets differ");
  for (std::size_t i = 0; i < q.size(); ++i)
    if (q[i] > 0.0 && p[i] <= 0.0) return std::numeric_limits<double>::infinity();
  const double d = kernels::omp::sum(q.size(), [&](std::size_t i) {
    return q[i] > 0.0 ? q[i] * std::log(q[i] / p[i]) : 0.0;
  });
  return std::max(d, 0.0);
}

Pmf tilt(const Pmf& p, double beta, std::span<const std::size_t> support) {
  if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("tilt: beta must lie in (0, 1]");
  std::vector<double> out(p.size(), 0.0);
  CompensatedSum z;
  for (std::size_t i : support) {
    if (i >= p.size()) throw DomainError("tilt: support index out of range");
    if (out[i] != 0.0) continue;
    if (p[i] > 0.0) {
      out[i] = std::pow(p[i], beta);
      z.add(out[i]);
    }
  }
  if (!(z.value() > 0.0)) throw DomainError("tilt: support has zero mass");
  for (double& v : out) v /= z.value();
  return Pmf(std::move(out), p.alphabet_size(), p.block_length(), 1e-9);
}

Pmf tilt(const Pmf& p, double beta) {
  std::vector<std::size_t> all(p.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return tilt(p, beta, all);
}

std::vector<std::size_t> sort_desc(std::span<const double> p) {
  std::vector<std::size_t> order(p.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p[a] > p[b]; });
  return order;
}

bool is_irreducible(std::span<const double> matrix, std::size_t size) {
  if (size == 0) return false;
  auto reaches_all = [&](bool transpose) {
    std::vector<char> seen(size, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < size; ++j) {
        const double w = transpose ? matrix[j * size + i] : matrix[i * size + j];
        if (w > 0.0 && !seen[j]) {
          seen[j] = 1;
          ++count;
          stack.push_back(j);
        }
      }
    }
    return count == size;
  };
  return reaches_all(false) && reaches_all(true);
}

bool is_irreducible(const StochasticMatrix& pi) {
  std::vector<double> flat(pi.size() * pi.size());
  for (std::size_t i = 0; i < pi.size(); ++i)
    for (std::size_t j = 0; j < pi.size(); ++j) flat[i * pi.size() + j] = pi(i, j);
  return is_irreducible(flat, pi.size());
}

Pmf stationary(const StochasticMatrix& pi) {
  if (!is_irreducible(pi)) throw ValidationError("stationary: chain is reducible");
  const auto k = static_cast<Eigen::Index>(pi.size());
  // (pi^T - I) q = 0 with the last balance equation replaced by sum(q) = 1.
  Eigen::MatrixXd a(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      a(i, j) = pi(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) - (i == j ? 1.0 : 0.0);
  a.row(k - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
  b(k - 1) = 1.0;
  Eigen::VectorXd q = a.fullPivLu().solve(b);

  std::vector<double> out(pi.size());
  double residual = 0.0;
  for (Eigen::Index j = 0; j < k; ++j) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < k; ++i)
      acc += q(i) * pi(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    residual = std::max(residual, std::abs(acc - q(j)));
    out[static_cast<std::size_t>(j)] = std::max(q(j), 0.0);
  }
  if (residual > 1e-10) throw NumericalError("stationary: residual " + std::to_string(residual));
  return Pmf(std::move(out), 1e-10);
}

PerronResult perron_root(std::span<const double> matrix, std::size_t size, double rel_tol,
                         std::size_t max_iter) {
  if (matrix.size() != size * size) throw DomainError("perron_root: matrix is not square");
  if (!is_irreducible(matrix, size)) throw ValidationError("perron_root: matrix is reducible");
  // Iterate on A + I: same Perron vector, primitive even for periodic A.
  std::vector<double> v(size, 1.0 / static_cast<double>(size));
  std::vector<double> w(size);
  PerronResult out;
  double lo = 0.0;
  double hi = 0.0;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    for (std::size_t i = 0; i < size; ++i) {
      CompensatedSum acc;
      acc.add(v[i]);
      for (std::size_t j = 0; j < size; ++j) acc.add(matrix[i * size + j] * v[j]);
      w[i] = acc.value();
    }
    lo = std::numeric_limits<double>::infinity();
    hi = 0.0;
    double norm = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
      const double ratio = w[i] / v[i];
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      norm += w[i];
    }
    for (std::size_t i = 0; i < size; ++i) v[i] = w[i] / norm;
    const double root = 0.5 * (lo + hi) - 1.0;
    out = {root, it, (hi - lo) / std::max(root, std::numeric_limits<double>::min())};
    if (hi - lo <= rel_tol * root) return out;
  }
  std::ostringstream msg;
  msg.precision(17);
  msg << "perron_root: no convergence after " << max_iter << " iterations; bracket [" << lo - 1.0
      << ", " << hi - 1.0 << "]";
  throw NumericalError(msg.str());
}

double markov_renyi_rate(const StochasticMatrix& pi, const Pmf& init, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("markov_renyi_rate: alpha must lie in (0,1)");
  if (init.size() != pi.size()) throw DomainError("markov_renyi_rate: init has the wrong size");
  const auto a = entrywise_power(pi, alpha);
  return std::log(perron_root(a, pi.size()).root) / (1.0 - alpha);
}

double markov_scaled_renyi_rate(const StochasticMatrix& pi, double theta) {
  if (!(theta >= 0.0)) throw DomainError("markov_scaled_renyi_rate: theta must be nonnegative");
  if (theta == 0.0) {
    if (!is_irreducible(pi)) throw ValidationError("markov: chain is reducible");
    return 0.0;
  }
  const auto a = entrywise_power(pi, 1.0 / (1.0 + theta));
  return (1.0 + theta) * std::log(perron_root(a, pi.size()).root);
}

double unifilar_scaled_renyi_rate(const UnifilarSource& src, double theta) {
  if (!(theta >= 0.0)) throw DomainError("unifilar_scaled_renyi_rate: theta must be nonnegative");
  const auto a = unifilar_state_matrix(src, 1.0 / (1.0 + theta));
  if (theta == 0.0) {
    if (!is_irreducible(a, src.num_states)) throw ValidationError("unifilar: state chain is reducible");
    return 0.0;
  }
  return (1.0 + theta) * std::log(perron_root(a, src.num_states).root);
}

double markov_entropy_rate(const StochasticMatrix& pi) {
  const Pmf q = stationary(pi);
  CompensatedSum acc;
  for (std::size_t i = 0; i < pi.size(); ++i) acc.add(q[i] * entropy(pi.row(i)));
  return acc.value();
}

double unifilar_entropy_rate(const UnifilarSource& src) {
  const Pmf q = stationary(to_stochastic(unifilar_state_matrix(src, 1.0), src.num_states));
  CompensatedSum acc;
  for (std::size_t s = 0; s < src.num_states; ++s) acc.add(q[s] * entropy(src.emission[s]));
  return acc.value();
}

}  // namespace keyguess
