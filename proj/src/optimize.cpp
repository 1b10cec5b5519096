#include "keyguess/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "keyguess/errors.hpp"

namespace keyguess {

ScalarMin golden_section(const std::function<double(double)>& f, double a, double b, double tol,
                         std::size_t max_iter) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (std::size_t it = 0; it < max_iter && b - a > tol; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? ScalarMin{c, fc, true} : ScalarMin{d, fd, true};
}

ScalarMin scan_then_golden(const std::function<double(double)>& f, double a, double b,
                           std::size_t points) {
  if (!(b >= a)) throw DomainError("scan_then_golden: empty interval");
  if (points < 2 || b == a) return {a, f(a), true};
  std::vector<double> xs(points);
  std::vector<double> vs(points);
  for (std::size_t i = 0; i < points; ++i) {
    xs[i] = i + 1 == points ? b : a + (b - a) * static_cast<double>(i) / (points - 1);
    vs[i] = f(xs[i]);
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < points; ++i)
    if (vs[i] < vs[best]) best = i;

  bool unimodal = true;
  for (std::size_t i = 1; i <= best; ++i)
    if (vs[i] > vs[i - 1] + 1e-12 * (1.0 + std::abs(vs[i - 1]))) unimodal = false;
  for (std::size_t i = best + 1; i < points; ++i)
    if (vs[i] < vs[i - 1] - 1e-12 * (1.0 + std::abs(vs[i - 1]))) unimodal = false;

  ScalarMin out{xs[best], vs[best], unimodal};
  const double lo = xs[best == 0 ? 0 : best - 1];
  const double hi = xs[std::min(best + 1, points - 1)];
  const ScalarMin refined = golden_section(f, lo, hi);
  if (refined.value < out.value) {
    out.x = refined.x;
    out.value = refined.value;
  }
  return out;
}

double bisect_root(const std::function<double(double)>& f, double a, double b, double tol) {
  const double fa = f(a);
  const double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) throw NumericalError("bisect_root: no sign change on interval");
  auto done = [tol](double lo, double hi) { return hi - lo <= tol; };
  boost::uintmax_t max_iter = 200;
  const auto bracket = boost::math::tools::bisect(f, a, b, done, max_iter);
  return 0.5 * (bracket.first + bracket.second);
}

}  // namespace keyguess
