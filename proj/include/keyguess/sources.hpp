#pragma once

// Finite-alphabet source models, n-letter PMFs, and the information measures
// everything else is built on. All quantities are in nats.

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace keyguess {

inline constexpr double kPmfTolerance = 1e-12;
inline constexpr double kProductPmfTolerance = 1e-9;
inline constexpr std::size_t kDefaultMaterializeCap = std::size_t{1} << 24;

/// Probability mass function over an indexed finite set.
///
/// An n-letter PMF indexes the |X|^n strings in lexicographic order with the
/// first letter most significant, so the last letter of string i is
/// i % alphabet_size().
class Pmf {
 public:
  Pmf() = default;
  /// Validates nonnegativity and unit mass within `tolerance`.
  explicit Pmf(std::vector<double> probs, double tolerance = kPmfTolerance);
  Pmf(std::vector<double> probs, std::size_t alphabet_size, unsigned block_length,
      double tolerance = kPmfTolerance);

  static Pmf uniform(std::size_t size);
  static Pmf point_mass(std::size_t size, std::size_t at);

  std::span<const double> probs() const noexcept { return probs_; }
  const std::vector<double>& values() const noexcept { return probs_; }
  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::size_t alphabet_size() const noexcept { return alphabet_size_; }
  unsigned block_length() const noexcept { return block_length_; }

 private:
  std::vector<double> probs_;
  std::size_t alphabet_size_ = 0;
  unsigned block_length_ = 1;
};

/// Square row-stochastic matrix, row-major.
class StochasticMatrix {
 public:
  StochasticMatrix() = default;
  explicit StochasticMatrix(std::vector<std::vector<double>> rows,
                            double tolerance = kPmfTolerance);

  std::size_t size() const noexcept { return size_; }
  double operator()(std::size_t from, std::size_t to) const {
    return entries_[from * size_ + to];
  }
  std::span<const double> row(std::size_t from) const {
    return std::span<const double>(entries_).subspan(from * size_, size_);
  }
  std::vector<std::vector<double>> rows() const;

 private:
  std::vector<double> entries_;
  std::size_t size_ = 0;
};

struct IidSource {
  Pmf marginal;
};

struct MarkovSource {
  Pmf init;
  StochasticMatrix transition;
  bool stationary = false;
};

/// Finite-state source whose next state is a deterministic function of the
/// current state and the emitted symbol.
struct UnifilarSource {
  std::size_t num_states = 0;
  std::size_t alphabet = 0;
  std::vector<std::vector<std::size_t>> next;  // next[state][symbol]
  std::vector<Pmf> emission;                   // emission[state] over symbols
  Pmf init;                                    // initial state distribution
};

/// Per-n PMFs listed directly; pmfs[n-1] is the n-letter PMF.
struct ExplicitSource {
  std::size_t alphabet = 0;
  std::vector<Pmf> pmfs;
};

using SourceModel = std::variant<IidSource, MarkovSource, UnifilarSource, ExplicitSource>;

/// Markov source; init defaults to the stationary distribution of `transition`.
MarkovSource make_markov(StochasticMatrix transition, std::optional<Pmf> init = std::nullopt);
/// Unifilar source; init defaults to the stationary distribution of the state chain.
UnifilarSource make_unifilar(std::vector<std::vector<std::size_t>> next,
                             std::vector<Pmf> emission, std::optional<Pmf> init = std::nullopt);

/// Throws ValidationError when the model breaks its invariants.
void validate(const SourceModel& model);
std::size_t alphabet_size(const SourceModel& model);

Pmf materialize(const SourceModel& model, unsigned n,
                std::size_t cap = kDefaultMaterializeCap);

double entropy(std::span<const double> p);
inline double entropy(const Pmf& p) { return entropy(p.probs()); }

/// Rényi entropy of order alpha (alpha > 0, alpha != 1).
double renyi_entropy(std::span<const double> p, double alpha);
inline double renyi_entropy(const Pmf& p, double alpha) { return renyi_entropy(p.probs(), alpha); }

/// (1 + theta) * ln sum_x p(x)^(1/(1+theta)), i.e. theta * H_{1/(1+theta)}(p),
/// well defined at theta = 0.
double scaled_renyi(std::span<const double> p, double theta);

/// D(q || p); +infinity when q is not absolutely continuous w.r.t. p.
double divergence(std::span<const double> q, std::span<const double> p);
inline double divergence(const Pmf& q, const Pmf& p) { return divergence(q.probs(), p.probs()); }

/// p^beta normalized on `support`, zero elsewhere.
Pmf tilt(const Pmf& p, double beta, std::span<const std::size_t> support);
Pmf tilt(const Pmf& p, double beta);

/// Indices ordered by decreasing probability, ties by ascending index.
std::vector<std::size_t> sort_desc(std::span<const double> p);
inline std::vector<std::size_t> sort_desc(const Pmf& p) { return sort_desc(p.probs()); }

/// Strong connectivity of the positive-entry graph of a square matrix.
bool is_irreducible(std::span<const double> matrix, std::size_t size);
bool is_irreducible(const StochasticMatrix& pi);

Pmf stationary(const StochasticMatrix& pi);

struct PerronResult {
  double root = 0.0;
  std::size_t iterations = 0;
  double relative_gap = 0.0;  // Collatz-Wielandt bracket width / root
};

/// Perron root of an irreducible nonnegative matrix by power iteration.
PerronResult perron_root(std::span<const double> matrix, std::size_t size,
                         double rel_tol = 1e-12, std::size_t max_iter = 100000);

/// lim (1/n) H_alpha(P_n) for a stationary irreducible chain, alpha in (0,1).
/// The limit does not depend on `init`, which is only checked for shape.
double markov_renyi_rate(const StochasticMatrix& pi, const Pmf& init, double alpha);

/// (1 + theta) ln lambda(pi^{o 1/(1+theta)}) = theta * (Rényi rate of order
/// 1/(1+theta)); equals 0 at theta = 0.
double markov_scaled_renyi_rate(const StochasticMatrix& pi, double theta);

/// Same quantity for a unifilar source, taken on its state chain.
double unifilar_scaled_renyi_rate(const UnifilarSource& src, double theta);

/// Shannon entropy rate H(pi | q) of a stationary chain.
double markov_entropy_rate(const StochasticMatrix& pi);
double unifilar_entropy_rate(const UnifilarSource& src);

}  // namespace keyguess
