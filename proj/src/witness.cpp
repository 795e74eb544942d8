#include "meanshift/witness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "meanshift/quadrature.hpp"

namespace meanshift {

namespace {

constexpr double kPi = 3.14159265358979323846;

double abs_sin_pi(double x) { return std::abs(std::sin(kPi * x)); }

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Witness scan_line(const BaseDistribution& dist, double v, double sin_level,
                  double cf_level, double t_lo, double t_hi, std::size_t count) {
  Witness best;
  const double av = std::abs(v);
  const double step = (t_hi - t_lo) / static_cast<double>(count);
  for (std::size_t i = 0; i <= count; ++i) {
    const double t = t_lo + step * static_cast<double>(i);
    const double sv = abs_sin_pi(v * t);
    if (sv + 1e-12 < sin_level) continue;
    const double mag = std::abs(dist.cf1(t));
    if (mag < cf_level) continue;
    if (!best.found || mag > best.cf_magnitude) {
      best = {true, {t}, sv, mag};
    }
  }
  // Peak-feasibility points |sin| = 1, useful when the scan grid straddles
  // narrow feasible windows.
  if (av > 0.0) {
    for (double k = 0.0; (k + 0.5) / av <= t_hi; k += 1.0) {
      const double t = (k + 0.5) / av;
      if (t < t_lo) continue;
      const double sv = abs_sin_pi(v * t);
      if (sv + 1e-12 < sin_level) continue;
      const double mag = std::abs(dist.cf1(t));
      if (mag < cf_level) continue;
      if (!best.found || mag > best.cf_magnitude) best = {true, {t}, sv, mag};
    }
  }
  return best;
}

}  // namespace

nlohmann::json Witness::to_json() const {
  return {{"found", found},
          {"omega", omega},
          {"sin_value", sin_value},
          {"cf_magnitude", cf_magnitude}};
}

Witness find_witness_on_grid(const BaseDistribution& dist,
                             std::span<const double> v, double sin_level,
                             double cf_level, const Cover& grid) {
  if (grid.dim != dist.dim() || v.size() != static_cast<std::size_t>(dist.dim()))
    throw std::invalid_argument("find_witness_on_grid: dimension mismatch");
  Witness best;
  for (const auto& g : grid.points) {
    const double sv = abs_sin_pi(dot(v, g));
    if (sv + 1e-12 < sin_level) continue;
    const double mag = std::abs(dist.cf(g));
    if (mag < cf_level) continue;
    if (!best.found || mag > best.cf_magnitude) {
      best.found = true;
      best.omega = g;
      best.sin_value = sv;
      best.cf_magnitude = mag;
    }
  }
  return best;
}

Witness find_witness(const BaseDistribution& dist, std::span<const double> v,
                     double sin_level, double cf_level, const Cover& grid) {
  if (v.size() != static_cast<std::size_t>(dist.dim()))
    throw std::invalid_argument("find_witness: dimension mismatch");
  if (!(sin_level >= 0.0 && sin_level <= 1.0))
    throw std::invalid_argument("find_witness: sin_level outside [0, 1]");
  if (!(cf_level > 0.0 && cf_level <= 1.0))
    throw std::invalid_argument("find_witness: cf_level outside (0, 1]");

  if (sin_level <= 0.0) {
    return {true, std::vector<double>(dist.dim(), 0.0), 0.0, 1.0};
  }
  const double vnorm = norm2(v);
  if (vnorm > 0.0) {
    switch (dist.kind()) {
      case DistKind::gaussian:
      case DistKind::laplace: {
        // Minimal-norm frequency achieving the sine level along v.
        const double scale = std::asin(std::min(sin_level, 1.0)) /
                             (kPi * vnorm * vnorm);
        std::vector<double> omega(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) omega[i] = scale * v[i];
        const double sv = abs_sin_pi(dot(v, omega));
        const double mag = std::abs(dist.cf(omega));
        if (sv + 1e-12 >= sin_level && mag >= cf_level)
          return {true, omega, sv, mag};
        break;
      }
      case DistKind::uniform:
      case DistKind::uniform_conv: {
        const double t0 =
            std::asin(std::min(sin_level, 1.0)) / (kPi * vnorm);
        const double span = std::max(2.0, 2.0 / vnorm);
        Witness w = scan_line(dist, v[0], sin_level, cf_level,
                              std::min(t0, 0.25 / vnorm), t0 + span, 1 << 16);
        if (w.found) return w;
        break;
      }
    }
  }
  return find_witness_on_grid(dist, v, sin_level, cf_level, grid);
}

std::vector<std::vector<double>> sphere_directions(int dim, double resolution) {
  if (dim == 1) return {{1.0}, {-1.0}};
  Cover c = build_cover(1.0, resolution, dim);
  std::vector<std::vector<double>> dirs;
  for (auto& p : c.points) {
    const double n = norm2(p);
    if (n < 1e-12) continue;
    for (auto& x : p) x /= n;
    dirs.push_back(p);
  }
  if (dirs.empty()) throw std::invalid_argument("sphere_directions: no points");
  return dirs;
}

ShiftVisibility shift_visibility(const BaseDistribution& dist, double epsilon,
                                 double alpha,
                                 const std::vector<std::vector<double>>& directions,
                                 const LineScan& scan) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("shift_visibility: epsilon <= 0");
  if (!(alpha >= 0.0 && alpha < 0.5))
    throw std::invalid_argument("shift_visibility: alpha outside [0, 1/2)");
  if (directions.empty())
    throw std::invalid_argument("shift_visibility: no directions");
  if (scan.count < 2) throw std::invalid_argument("shift_visibility: scan too small");

  // Feasible radial frequencies: dist(t * epsilon, Z) >= alpha. The feasible
  // set does not depend on the direction.
  auto feasible = [&](double t) {
    const double x = t * epsilon;
    return std::abs(x - std::round(x)) >= alpha - 1e-12;
  };
  std::vector<double> ts;
  const double step = scan.max / static_cast<double>(scan.count);
  for (std::size_t i = 0; i <= scan.count; ++i) {
    const double t = step * static_cast<double>(i);
    if (feasible(t)) ts.push_back(t);
  }
  for (double k = 0.0; k / epsilon <= scan.max + 1.0; k += 1.0) {
    for (double t : {(k + alpha) / epsilon, (k + 1.0 - alpha) / epsilon,
                     (k + 0.5) / epsilon}) {
      if (t >= 0.0 && t <= scan.max && feasible(t)) ts.push_back(t);
    }
  }
  ShiftVisibility out;
  if (ts.empty()) return out;
  out.feasible = true;
  if (alpha == 0.0) {
    // t = 0 is feasible and cf(0) = 1 dominates every direction.
    out.value = 1.0;
    out.direction = directions.front();
    out.radial = 0.0;
    return out;
  }
  bool first = true;
  std::vector<double> omega(dist.dim());
  for (const auto& u : directions) {
    if (u.size() != static_cast<std::size_t>(dist.dim()))
      throw std::invalid_argument("shift_visibility: direction dimension");
    double best_mag = -1.0;
    double best_t = 0.0;
    for (double t : ts) {
      for (std::size_t j = 0; j < u.size(); ++j) omega[j] = t * u[j];
      const double mag = std::abs(dist.cf(omega));
      if (mag > best_mag) {
        best_mag = mag;
        best_t = t;
      }
    }
    if (first || best_mag < out.value) {
      first = false;
      out.value = best_mag;
      out.direction = u;
      out.radial = best_t;
    }
  }
  return out;
}

double band_l2_mass(const BaseDistribution& dist, double epsilon,
                    double band_halfwidth, double omega_max, double quad_step) {
  if (dist.dim() != 1)
    throw std::invalid_argument("band_l2_mass: univariate only");
  if (!(epsilon > 0.0)) throw std::invalid_argument("band_l2_mass: epsilon <= 0");
  if (!(band_halfwidth >= 0.0))
    throw std::invalid_argument("band_l2_mass: negative band halfwidth");
  if (!(omega_max > 0.0) || !(quad_step > 0.0))
    throw std::invalid_argument("band_l2_mass: bad quadrature window");
  if (band_halfwidth >= 0.5) return 0.0;  // bands cover every frequency
  const double gap = (1.0 - 2.0 * band_halfwidth) / epsilon;
  if (quad_step > gap)
    throw std::invalid_argument(
        "band_l2_mass: quad_step wider than the inter-band gap");

  auto cf2 = [&](double w) {
    const double m = std::abs(dist.cf1(w));
    return m * m;
  };
  double integral = 0.0;
  for (double k = 0.0;; k += 1.0) {
    const double a = (k + band_halfwidth) / epsilon;
    if (a >= omega_max) break;
    const double b = std::min((k + 1.0 - band_halfwidth) / epsilon, omega_max);
    if (b > a) integral += composite_simpson(cf2, a, b, quad_step);
  }

  const double m1 = dist.constants().deriv_l1;
  double tail = m1 * m1 / (4.0 * kPi * kPi * omega_max);  // |cf| <= M1/(2 pi w)
  switch (dist.kind()) {
    case DistKind::gaussian:
      tail = std::min(tail, std::exp(-4.0 * kPi * kPi * omega_max * omega_max) /
                                (8.0 * kPi * kPi * omega_max));
      break;
    case DistKind::laplace:
      tail = std::min(tail, 1.0 / (12.0 * std::pow(kPi, 4) *
                                   omega_max * omega_max * omega_max));
      break;
    case DistKind::uniform:
      break;
    case DistKind::uniform_conv: {
      const int m = dist.fold();
      tail = std::min(tail, std::pow(2.0 * kPi, -2 * m) *
                                std::pow(omega_max, 1.0 - 2.0 * m) /
                                (2.0 * m - 1.0));
      break;
    }
  }
  return std::sqrt(2.0 * (integral + tail));
}

double cf_l2_norm(const BaseDistribution& dist, double omega_max,
                  double quad_step) {
  // Halfwidth 0 keeps every frequency: the band restriction is vacuous.
  return band_l2_mass(dist, 1.0, 0.0, omega_max, quad_step);
}

L2LinftyReport l2_linfty_check(const BaseDistribution& dist,
                               const IntervalSet& set) {
  if (dist.dim() != 1)
    throw std::invalid_argument("l2_linfty_check: univariate only");
  double prev_end = -std::numeric_limits<double>::infinity();
  for (const auto& [a, b] : set.intervals) {
    if (!(a <= b) || a < prev_end)
      throw std::invalid_argument("l2_linfty_check: intervals must be sorted and disjoint");
    prev_end = b;
  }
  auto cf2 = [&](double w) {
    const double m = std::abs(dist.cf1(w));
    return m * m;
  };
  L2LinftyReport r;
  double sq = 0.0;
  for (const auto& [a, b] : set.intervals) {
    if (a == b) continue;
    sq += integrate(cf2, a, b, 1e-13).value;
    const std::size_t n = 2048;
    for (std::size_t i = 0; i <= n; ++i) {
      const double w = a + (b - a) * static_cast<double>(i) / n;
      r.linfty = std::max(r.linfty, std::abs(dist.cf1(w)));
    }
  }
  r.l2 = std::sqrt(std::max(sq, 0.0));
  r.bound = 4.0 * std::sqrt(r.linfty * dist.constants().deriv_l1);
  r.ok = r.l2 <= r.bound + 1e-12;
  return r;
}

}  // namespace meanshift
