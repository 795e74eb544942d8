#include "meanshift/lowerbound.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "meanshift/errors.hpp"
#include "meanshift/quadrature.hpp"
#include "meanshift/witness.hpp"

namespace meanshift {

namespace {

constexpr double kPi = 3.14159265358979323846;

double window_prefactor(double epsilon, double alpha) {
  return (1.0 - alpha) * epsilon / alpha;
}

void check_lattice_args(double epsilon, double alpha, double w) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("lattice: epsilon <= 0");
  if (!(alpha > 0.0 && alpha < 0.5))
    throw std::invalid_argument("lattice: alpha outside (0, 1/2)");
  if (!(w > 0.0)) throw std::invalid_argument("lattice: w <= 0");
}

}  // namespace

double window_hat(double w, double omega) {
  if (!(w > 0.0)) throw std::invalid_argument("window_hat: w <= 0");
  const double a = 6.0 * omega / w;
  auto p3 = [](double x) { return unit_sum3_cdf((x + 3.0) / 2.0); };
  return p3(a + 9.0) - p3(a - 9.0);
}

double window_time(double w, double x) {
  if (!(w > 0.0)) throw std::invalid_argument("window_time: w <= 0");
  const double s = sinc(w * x / 3.0);
  return 3.0 * w * sinc(3.0 * w * x) * s * s * s;
}

double window_total_variation_tail(double w, double rho) {
  if (!(w > 0.0) || !(rho > 0.0))
    throw std::invalid_argument("window_total_variation_tail: bad arguments");
  if (w * rho < 1.0)
    throw std::invalid_argument(
        "window_total_variation_tail: requires w * rho >= 1");
  return 144.0 / (kPi * kPi * kPi * w * w * rho * rho * rho);
}

double SignedAtomicMeasure::total_mass() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.weight;
  return s;
}

double SignedAtomicMeasure::l1_norm() const {
  double s = 0.0;
  for (const auto& a : atoms) s += std::abs(a.weight);
  return s;
}

double SignedAtomicMeasure::l1_beyond(double r) const {
  double s = 0.0;
  for (const auto& a : atoms)
    if (std::abs(a.location) > r) s += std::abs(a.weight);
  return s;
}

std::complex<double> SignedAtomicMeasure::cf(double omega) const {
  double re = 0.0, im = 0.0;
  for (const auto& a : atoms) {
    const double t = kTwoPi * omega * a.location;
    re += a.weight * std::cos(t);
    im += a.weight * std::sin(t);
  }
  return {re, im};
}

nlohmann::json SignedAtomicMeasure::to_json() const {
  std::vector<double> locs, ws;
  locs.reserve(atoms.size());
  ws.reserve(atoms.size());
  for (const auto& a : atoms) {
    locs.push_back(a.location);
    ws.push_back(a.weight);
  }
  return {{"locations", locs},
          {"weights", ws},
          {"truncation_radius", truncation_radius},
          {"dropped_l1_bound", dropped_l1_bound}};
}

SignedAtomicMeasure SignedAtomicMeasure::from_json(const nlohmann::json& j) {
  SignedAtomicMeasure m;
  const auto locs = j.at("locations").get<std::vector<double>>();
  const auto ws = j.at("weights").get<std::vector<double>>();
  if (locs.size() != ws.size())
    throw std::invalid_argument("atomic measure: ragged arrays");
  for (std::size_t i = 0; i < locs.size(); ++i)
    m.atoms.push_back({locs[i], ws[i]});
  if (!std::is_sorted(m.atoms.begin(), m.atoms.end(),
                      [](const SignedAtom& a, const SignedAtom& b) {
                        return a.location < b.location;
                      }))
    throw std::invalid_argument("atomic measure: locations must be sorted");
  m.truncation_radius = j.value("truncation_radius", 0.0);
  m.dropped_l1_bound = j.value("dropped_l1_bound", 0.0);
  return m;
}

double lattice_tail_bound(double epsilon, double alpha, double w, double rho) {
  check_lattice_args(epsilon, alpha, w);
  return window_prefactor(epsilon, alpha) *
         window_total_variation_tail(w, rho - epsilon / 2.0);
}

SignedAtomicMeasure lattice_measure(double epsilon, double alpha, double w,
                                    std::size_t truncation_index) {
  check_lattice_args(epsilon, alpha, w);
  const double kmin_d = 2.0 / (w * epsilon);
  if (static_cast<double>(truncation_index) < kmin_d)
    throw resource_error("lattice_measure: truncation_index must be at least " +
                         std::to_string(static_cast<std::size_t>(
                             std::ceil(kmin_d))));
  const auto k_count = truncation_index;
  const double pref = window_prefactor(epsilon, alpha);
  // Differences evaluated at |k| eps only, so mirrored atoms cancel exactly.
  std::vector<double> pos_weight(k_count + 1);
  for (std::size_t k = 0; k <= k_count; ++k) {
    const double a = window_time(w, static_cast<double>(k) * epsilon);
    const double b = window_time(w, static_cast<double>(k + 1) * epsilon);
    pos_weight[k] = pref * (a - b);
  }
  SignedAtomicMeasure g;
  g.atoms.reserve(2 * k_count + 2);
  for (std::size_t i = 0; i <= k_count; ++i) {
    const std::size_t j = k_count - i;  // mirror of nonnegative index j
    if (pos_weight[j] != 0.0)
      g.atoms.push_back(
          {-(static_cast<double>(j) * epsilon + epsilon / 2.0), -pos_weight[j]});
  }
  for (std::size_t k = 0; k <= k_count; ++k) {
    if (pos_weight[k] != 0.0)
      g.atoms.push_back(
          {static_cast<double>(k) * epsilon + epsilon / 2.0, pos_weight[k]});
  }
  g.truncation_radius = (static_cast<double>(k_count) + 0.5) * epsilon;
  g.dropped_l1_bound = lattice_tail_bound(
      epsilon, alpha, w, (static_cast<double>(k_count) + 1.5) * epsilon);
  return g;
}

std::size_t default_truncation_index(double epsilon, double alpha, double w,
                                     double tol) {
  check_lattice_args(epsilon, alpha, w);
  if (!(tol > 0.0)) throw std::invalid_argument("default_truncation_index: tol <= 0");
  const std::size_t kmin =
      static_cast<std::size_t>(std::ceil(2.0 / (w * epsilon)));
  const double l1 = lattice_measure(epsilon, alpha, w, kmin).l1_norm();
  const double target = std::max(tol * l1, 1e-300);
  // lattice_tail_bound at rho = (K + 1.5) eps <= target.
  const double rho = std::cbrt(window_prefactor(epsilon, alpha) * 144.0 /
                               (kPi * kPi * kPi * w * w * target));
  const double k = rho / epsilon - 0.5;
  return std::max(kmin, static_cast<std::size_t>(std::ceil(std::max(k, 1.0))));
}

std::pair<SignedAtomicMeasure, SignedAtomicMeasure> jordan_split(
    const SignedAtomicMeasure& g) {
  const double m = g.l1_norm() / 2.0;
  if (m > 1.0 + 1e-12)
    throw infeasible_error(
        "jordan_split: matching mass " + std::to_string(m) +
        " exceeds 1; reduce the window scale");
  const double rest = std::max(1.0 - m, 0.0);
  SignedAtomicMeasure q0, q1;
  q0.truncation_radius = q1.truncation_radius = g.truncation_radius;
  q0.dropped_l1_bound = q1.dropped_l1_bound = g.dropped_l1_bound;
  bool placed0 = false, placed1 = false;
  auto place_rest = [&](SignedAtomicMeasure& q, bool& placed, double loc) {
    if (!placed && rest > 0.0 && loc > 0.0) {
      q.atoms.push_back({0.0, rest});
      placed = true;
    }
  };
  for (const auto& a : g.atoms) {
    place_rest(q0, placed0, a.location);
    place_rest(q1, placed1, a.location);
    if (a.weight < 0.0) {
      if (a.location == 0.0) throw std::logic_error("jordan_split: atom at 0");
      q0.atoms.push_back({a.location, -a.weight});
    } else if (a.weight > 0.0) {
      if (a.location == 0.0) throw std::logic_error("jordan_split: atom at 0");
      q1.atoms.push_back({a.location, a.weight});
    }
  }
  place_rest(q0, placed0, 1.0);
  place_rest(q1, placed1, 1.0);
  return {q0, q1};
}

double feasibility_frontier(double epsilon, double alpha, double tol) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("frontier: epsilon <= 0");
  if (!(alpha > 0.0 && alpha < 0.5))
    throw std::invalid_argument("frontier: alpha outside (0, 1/2)");
  if (!(tol > 0.0 && tol < 0.1)) throw std::invalid_argument("frontier: bad tol");
  auto l1_at = [&](double c) {
    const double w = c * alpha / epsilon;
    return lattice_measure(epsilon, alpha, w,
                           default_truncation_index(epsilon, alpha, w))
        .l1_norm();
  };
  // Keep adjacent frequency bands disjoint: c alpha < 1/4.
  const double cmax = std::min(1.0, 0.2499 / alpha);
  if (l1_at(cmax) <= 2.0) return cmax;
  double lo = 0.05;
  if (l1_at(lo) > 2.0)
    throw infeasible_error("feasibility_frontier: no workable window scale");
  double hi = cmax;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (l1_at(mid) <= 2.0 ? lo : hi) = mid;
  }
  return lo;
}

double periodized_window_hat(double w, double epsilon, double omega) {
  if (!(epsilon > 0.0))
    throw std::invalid_argument("periodized_window_hat: epsilon <= 0");
  if (!(w > 0.0)) throw std::invalid_argument("periodized_window_hat: w <= 0");
  if (w >= 0.25 / epsilon)
    throw infeasible_error(
        "periodized_window_hat: frequency bands overlap (w >= 1/(4 eps))");
  const double kc = std::round(omega * epsilon);
  double s = 0.0;
  for (double k = kc - 3.0; k <= kc + 3.0; k += 1.0)
    s += window_hat(w, omega - k / epsilon);
  return s;
}

std::complex<double> HardInstancePair::shift_mixture_cf_gap(double omega) const {
  const std::complex<double> two_point{0.0, 2.0 * std::sin(kPi * epsilon * omega)};
  return (1.0 - alpha) * two_point + alpha * (q0.cf(omega) - q1.cf(omega));
}

std::complex<double> HardInstancePair::observed_cf_gap(double omega) const {
  return base.cf1(omega) * shift_mixture_cf_gap(omega);
}

nlohmann::json HardInstancePair::to_json() const {
  nlohmann::json j;
  j["version"] = 1;
  j["base"] = base.to_json();
  j["epsilon"] = epsilon;
  j["alpha"] = alpha;
  j["window_scale"] = window_scale;
  j["w"] = w;
  j["mix_mass"] = mix_mass;
  j["g"] = g.to_json();
  j["q0"] = q0.to_json();
  j["q1"] = q1.to_json();
  return j;
}

HardInstancePair HardInstancePair::from_json(const nlohmann::json& j) {
  if (j.value("version", 0) != 1)
    throw std::invalid_argument("hard instance: unsupported version");
  HardInstancePair p{BaseDistribution::from_json(j.at("base")),
                     j.at("epsilon").get<double>(),
                     j.at("alpha").get<double>(),
                     j.at("window_scale").get<double>(),
                     j.at("w").get<double>(),
                     j.at("mix_mass").get<double>(),
                     SignedAtomicMeasure::from_json(j.at("g")),
                     SignedAtomicMeasure::from_json(j.at("q0")),
                     SignedAtomicMeasure::from_json(j.at("q1"))};
  return p;
}

HardInstancePair build_hard_instance(const BaseDistribution& base,
                                     double epsilon, double alpha,
                                     std::optional<double> window_scale,
                                     std::optional<std::size_t> truncation_index) {
  if (base.dim() != 1)
    throw std::invalid_argument("build_hard_instance: univariate only");
  if (!(epsilon > 0.0 && epsilon < 4.0))
    throw std::invalid_argument("build_hard_instance: epsilon outside (0, 4)");
  if (!(alpha >= 0.0 && alpha < 0.5))
    throw std::invalid_argument("build_hard_instance: alpha outside [0, 1/2)");

  HardInstancePair inst{base, epsilon, alpha, 0.0, 0.0, 0.0, {}, {}, {}};
  if (alpha == 0.0) {
    // No outlier budget: both sides place the outlier law at the origin.
    inst.q0.atoms = {{0.0, 1.0}};
    inst.q1.atoms = {{0.0, 1.0}};
    return inst;
  }
  const double c =
      window_scale ? *window_scale : feasibility_frontier(epsilon, alpha);
  if (!(c > 0.0 && c <= 1.0))
    throw std::invalid_argument("build_hard_instance: window_scale outside (0, 1]");
  const double w = c * alpha / epsilon;
  if (w >= 0.25 / epsilon)
    throw infeasible_error(
        "build_hard_instance: frequency bands overlap; reduce window_scale");
  const std::size_t k = truncation_index
                            ? *truncation_index
                            : default_truncation_index(epsilon, alpha, w);
  inst.window_scale = c;
  inst.w = w;
  inst.g = lattice_measure(epsilon, alpha, w, k);
  auto [q0, q1] = jordan_split(inst.g);
  inst.q0 = std::move(q0);
  inst.q1 = std::move(q1);
  inst.mix_mass = inst.g.l1_norm() / 2.0;
  return inst;
}

namespace {

// Signed density of p0 - p1: two clean bumps at +/- eps/2 plus the matching
// lattice scaled by -alpha.
struct GapDensity {
  const BaseDistribution* base;
  std::vector<SignedAtom> atoms;  // sorted by location
  double support;

  double operator()(double x) const {
    const auto lo = std::lower_bound(
        atoms.begin(), atoms.end(), x - support,
        [](const SignedAtom& a, double v) { return a.location < v; });
    double s = 0.0;
    for (auto it = lo; it != atoms.end() && it->location <= x + support; ++it)
      s += it->weight * base->density(x - it->location);
    return s;
  }
};

double base_far_tail(const BaseDistribution& base) {
  switch (base.kind()) {
    case DistKind::gaussian: return 2e-21;  // mass beyond the effective support
    case DistKind::laplace: return 3e-19;
    default: return 0.0;
  }
}

}  // namespace

TvBound tv_distance(const HardInstancePair& inst, double quad_tol) {
  if (inst.base.dim() != 1)
    throw std::invalid_argument("tv_distance: univariate only");
  if (!(quad_tol > 0.0 && quad_tol <= 1e-2))
    throw std::invalid_argument("tv_distance: bad quad_tol");
  const double alpha = inst.alpha;
  const double eps = inst.epsilon;

  GapDensity gap;
  gap.base = &inst.base;
  gap.support = inst.base.effective_support();
  gap.atoms.push_back({-eps / 2.0, -(1.0 - alpha)});
  gap.atoms.push_back({eps / 2.0, 1.0 - alpha});
  for (const auto& a : inst.g.atoms)
    gap.atoms.push_back({a.location, -alpha * a.weight});
  std::sort(gap.atoms.begin(), gap.atoms.end(),
            [](const SignedAtom& a, const SignedAtom& b) {
              return a.location < b.location;
            });

  // Cut the line at atom locations and at the kinks each atom's bump inherits
  // from the base density.
  std::vector<double> cuts;
  const bool box = inst.base.kind() == DistKind::uniform ||
                   inst.base.kind() == DistKind::uniform_conv;
  for (const auto& a : gap.atoms) {
    cuts.push_back(a.location);
    if (box) {
      const int m = inst.base.fold();
      for (int j = -m; j <= m; j += 2)
        cuts.push_back(a.location + static_cast<double>(j));
    }
  }
  const double xmax =
      std::abs(gap.atoms.back().location) > std::abs(gap.atoms.front().location)
          ? std::abs(gap.atoms.back().location) + gap.support
          : std::abs(gap.atoms.front().location) + gap.support;
  cuts.push_back(-xmax);
  cuts.push_back(xmax);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-12; }),
             cuts.end());
  while (!cuts.empty() && cuts.front() < -xmax) cuts.erase(cuts.begin());
  while (!cuts.empty() && cuts.back() > xmax) cuts.pop_back();

  auto abs_gap = [&](double x) { return std::abs(gap(x)); };
  const QuadResult qr = integrate_piecewise(abs_gap, cuts, quad_tol);
  double mass_total = 0.0;
  for (const auto& a : gap.atoms) mass_total += std::abs(a.weight);

  TvBound out;
  out.direct = 0.5 * qr.value;
  out.direct_error = 0.5 * (qr.error + mass_total * base_far_tail(inst.base));

  // Certified route: spatial tail at radius R plus the CF gap in L2.
  const double band_halfwidth = alpha > 0.0 ? inst.w * eps : 0.0;
  double omega_max = 0.0;
  switch (inst.base.kind()) {
    case DistKind::gaussian: omega_max = 2.5; break;
    case DistKind::laplace: omega_max = 400.0; break;
    default: omega_max = 2e4; break;
  }
  const double gapw = (1.0 - 2.0 * band_halfwidth) / eps;
  const double step = std::min(0.01, gapw / 8.0);
  const double offband = band_l2_mass(inst.base, eps, band_halfwidth,
                                      omega_max, step);
  double dropped_cf_l2 = 0.0;
  if (alpha > 0.0 && inst.g.dropped_l1_bound > 0.0)
    dropped_cf_l2 = alpha * inst.g.dropped_l1_bound *
                    cf_l2_norm(inst.base, omega_max, step);
  out.gap_l2 = 2.0 * (1.0 - alpha) * offband + dropped_cf_l2;

  const double sigma = inst.base.constants().tail_sigma;
  auto tail_l1 = [&](double r) {
    double t = 2.0 * std::min(1.0, 2.0 * sigma / r);
    if (eps > r) t += 2.0 * (1.0 - alpha);
    if (alpha > 0.0)
      t += alpha * (inst.q0.l1_beyond(r / 2.0) + inst.q1.l1_beyond(r / 2.0));
    return t;
  };
  const double rlo = std::max(eps, 1e-2);
  const double rhi = std::max({100.0, 4.0 * inst.g.truncation_radius,
                               4.0 * std::pow(2.0 * sigma /
                                                  std::max(out.gap_l2, 1e-15),
                                              2.0 / 3.0)});
  double best = 1.0;
  double best_r = rlo;
  const int grid = 600;
  for (int i = 0; i <= grid; ++i) {
    const double r =
        rlo * std::pow(rhi / rlo, static_cast<double>(i) / grid);
    const double v = 0.5 * tail_l1(r) + std::sqrt(r / 2.0) * out.gap_l2;
    if (v < best) {
      best = v;
      best_r = r;
    }
  }
  out.certified = best;
  out.split_radius = best_r;
  return out;
}

std::optional<std::uint64_t> sample_lower_bound_from_tv(double tv) {
  if (tv >= 1.0) return 1;
  if (!(tv > 0.0)) return std::nullopt;
  const double n = std::ceil(std::log(1.5) / tv - 1e-9);
  if (n > 9e18) return static_cast<std::uint64_t>(9e18);
  return static_cast<std::uint64_t>(std::max(n, 1.0));
}

}  // namespace meanshift
