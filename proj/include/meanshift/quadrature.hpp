#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace meanshift {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // accumulated Richardson error estimate
  std::size_t evals = 0;
};

namespace detail {

template <class F>
void simpson_rec(const F& f, double a, double m, double b, double fa,
                 double fm, double fb, double whole, double tol, int depth,
                 QuadResult& acc) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  acc.evals += 2;
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) {
    acc.value += left + right + diff / 15.0;
    acc.error += std::abs(diff) / 15.0;
    return;
  }
  simpson_rec(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1, acc);
  simpson_rec(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1, acc);
}

}  // namespace detail

// Adaptive Simpson with absolute tolerance; integrand must be finite on [a,b].
template <class F>
QuadResult integrate(const F& f, double a, double b, double tol = 1e-10,
                     int max_depth = 48) {
  if (!(a <= b)) throw std::invalid_argument("integrate: a > b");
  if (a == b) return {};
  QuadResult acc;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  acc.evals = 3;
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  detail::simpson_rec(f, a, m, b, fa, fm, fb, whole, tol, max_depth, acc);
  return acc;
}

// Integrates across the sorted cut points, splitting the tolerance evenly.
// Useful when the integrand has kinks or spikes at known locations.
template <class F>
QuadResult integrate_piecewise(const F& f, const std::vector<double>& cuts,
                               double tol = 1e-10, int max_depth = 48) {
  if (cuts.size() < 2) throw std::invalid_argument("integrate_piecewise: need >= 2 cuts");
  if (!std::is_sorted(cuts.begin(), cuts.end()))
    throw std::invalid_argument("integrate_piecewise: cuts not sorted");
  QuadResult total;
  const double piece_tol = tol / static_cast<double>(cuts.size() - 1);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    QuadResult r = integrate(f, cuts[i], cuts[i + 1], piece_tol, max_depth);
    total.value += r.value;
    total.error += r.error;
    total.evals += r.evals;
  }
  return total;
}

// Composite Simpson with step <= h (panel count rounded up to even).
template <class F>
double composite_simpson(const F& f, double a, double b, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("composite_simpson: h <= 0");
  if (!(a <= b)) throw std::invalid_argument("composite_simpson: a > b");
  if (a == b) return 0.0;
  std::size_t n = static_cast<std::size_t>(std::ceil((b - a) / h));
  n += n % 2;
  if (n < 2) n = 2;
  const double step = (b - a) / static_cast<double>(n);
  double sum = f(a) + f(b);
  for (std::size_t i = 1; i < n; ++i) {
    sum += (i % 2 ? 4.0 : 2.0) * f(a + step * static_cast<double>(i));
  }
  return sum * step / 3.0;
}

}  // namespace meanshift
