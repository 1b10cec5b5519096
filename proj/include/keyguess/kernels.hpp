#pragma once

// Data-parallel inner loops used across the library.
//
// Every kernel exists twice: `serial::` is the plain reference kept for
// testing and benchmarking, `omp::` is what the library calls. The OpenMP
// reductions split the index range into fixed-size chunks whose partial
// results are combined in chunk order, so their output is bit-identical for
// any thread count.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace keyguess {

/// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (!std::isfinite(t)) {
      sum_ = t;
      comp_ = 0.0;
      return;
    }
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct ArgMin {
  double value = std::numeric_limits<double>::infinity();
  std::size_t index = 0;
};

namespace kernels {

inline constexpr std::size_t kChunk = std::size_t{1} << 12;

inline std::size_t chunk_count(std::size_t count) {
  return (count + kChunk - 1) / kChunk;
}

namespace serial {

template <class Term>
double sum(std::size_t count, Term&& term) {
  CompensatedSum acc;
  for (std::size_t i = 0; i < count; ++i) acc.add(term(i));
  return acc.value();
}

template <class LogTerm>
double log_sum_exp(std::size_t count, LogTerm&& log_term) {
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count; ++i) hi = std::max<double>(hi, log_term(i));
  if (!std::isfinite(hi)) return hi;
  CompensatedSum acc;
  for (std::size_t i = 0; i < count; ++i) acc.add(std::exp(log_term(i) - hi));
  return hi + std::log(acc.value());
}

template <class Value>
ArgMin argmin(std::size_t count, Value&& value) {
  ArgMin best;
  for (std::size_t i = 0; i < count; ++i) {
    const double v = value(i);
    if (v < best.value) best = {v, i};
  }
  return best;
}

// out[i * width + j] = in[i] * weight(i, j)
template <class Weight>
std::vector<double> extend(const std::vector<double>& in, std::size_t width,
                           Weight&& weight) {
  std::vector<double> out(in.size() * width);
  for (std::size_t i = 0; i < in.size(); ++i)
    for (std::size_t j = 0; j < width; ++j) out[i * width + j] = in[i] * weight(i, j);
  return out;
}

}  // namespace serial

namespace omp {

template <class Term>
double sum(std::size_t count, Term&& term) {
  const std::size_t chunks = chunk_count(count);
  std::vector<double> partial(chunks, 0.0);
  const auto n_chunks = static_cast<std::ptrdiff_t>(chunks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < n_chunks; ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kChunk;
    const std::size_t hi = std::min(count, lo + kChunk);
    CompensatedSum acc;
    for (std::size_t i = lo; i < hi; ++i) acc.add(term(i));
    partial[static_cast<std::size_t>(c)] = acc.value();
  }
  CompensatedSum total;
  for (double v : partial) total.add(v);
  return total.value();
}

template <class LogTerm>
double log_sum_exp(std::size_t count, LogTerm&& log_term) {
  const std::size_t chunks = chunk_count(count);
  const auto n_chunks = static_cast<std::ptrdiff_t>(chunks);
  std::vector<double> chunk_max(chunks, -std::numeric_limits<double>::infinity());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < n_chunks; ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kChunk;
    const std::size_t hi = std::min(count, lo + kChunk);
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = lo; i < hi; ++i) m = std::max<double>(m, log_term(i));
    chunk_max[static_cast<std::size_t>(c)] = m;
  }
  double hi_all = -std::numeric_limits<double>::infinity();
  for (double m : chunk_max) hi_all = std::max(hi_all, m);
  if (!std::isfinite(hi_all)) return hi_all;
  const double s = sum(count, [&](std::size_t i) { return std::exp(log_term(i) - hi_all); });
  return hi_all + std::log(s);
}

// Ties resolve to the smallest index.
template <class Value>
ArgMin argmin(std::size_t count, Value&& value) {
  const std::size_t chunks = chunk_count(count);
  std::vector<ArgMin> partial(chunks);
  const auto n_chunks = static_cast<std::ptrdiff_t>(chunks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < n_chunks; ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kChunk;
    const std::size_t hi = std::min(count, lo + kChunk);
    ArgMin best;
    best.index = lo;
    for (std::size_t i = lo; i < hi; ++i) {
      const double v = value(i);
      if (v < best.value) best = {v, i};
    }
    partial[static_cast<std::size_t>(c)] = best;
  }
  ArgMin best;
  for (const auto& p : partial)
    if (p.value < best.value) best = p;
  return best;
}

template <class Weight>
std::vector<double> extend(const std::vector<double>& in, std::size_t width,
                           Weight&& weight) {
  std::vector<double> out(in.size() * width);
  const auto rows = static_cast<std::ptrdiff_t>(in.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    const auto i = static_cast<std::size_t>(r);
    for (std::size_t j = 0; j < width; ++j) out[i * width + j] = in[i] * weight(i, j);
  }
  return out;
}

/// Evaluates `body(i)` for every i in [0, count) across threads.
template <class Body>
void for_each_index(std::size_t count, Body&& body) {
  const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
}

}  // namespace omp
}  // namespace kernels

/// Sets the OpenMP worker count; a no-op without OpenMP.
inline void set_thread_count(int threads) {
#if defined(_OPENMP)
  if (threads >= 1) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

}  // namespace keyguess
