#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "meanshift/distributions.hpp"

namespace meanshift {

// Smoothed plateau window. The transform window_hat(w, .) equals 1 on
// [-w, w], 0 outside [-2w, 2w], is C^2, and integrates to 3w; its inverse
// transform is window_time.
double window_hat(double w, double omega);
double window_time(double w, double x);  // 3w sinc(3wx) sinc^3(wx/3)

// Certified bound on the total variation of window_time outside [-rho, rho]:
// integral over |x| >= rho of |window_time'| <= 144 / (pi^3 w^2 rho^3).
// Valid for w * rho >= 1.
double window_total_variation_tail(double w, double rho);

struct SignedAtom {
  double location = 0.0;
  double weight = 0.0;
};

struct SignedAtomicMeasure {
  std::vector<SignedAtom> atoms;   // strictly increasing locations
  double truncation_radius = 0.0;  // atom locations bounded by this
  double dropped_l1_bound = 0.0;   // certified mass of the discarded atoms

  double total_mass() const;
  double l1_norm() const;
  double l1_beyond(double r) const;  // sum of |weight| at |location| > r
  std::complex<double> cf(double omega) const;

  nlohmann::json to_json() const;
  static SignedAtomicMeasure from_json(const nlohmann::json& j);
};

// Bound on the untruncated lattice measure's mass at |location| >= rho:
// prefactor (1-alpha) epsilon / alpha times the window variation tail at
// rho - epsilon/2. Valid for w (rho - epsilon/2) >= 1.
double lattice_tail_bound(double epsilon, double alpha, double w, double rho);

// Signed lattice measure matching the two-point difference through the
// window: weight (window_time(w, |k| eps) - window_time(w, (|k|+1) eps))
// scaled by (1-alpha) eps / alpha, placed at k eps + eps/2, k in [-K-1, K].
// Requires K >= 2 / (w epsilon); throws resource_error below that.
SignedAtomicMeasure lattice_measure(double epsilon, double alpha, double w,
                                    std::size_t truncation_index);

// Smallest truncation index whose dropped tail is below tol * l1_norm.
std::size_t default_truncation_index(double epsilon, double alpha, double w,
                                     double tol = 1e-6);

// Splits g into probability measures (q0, q1) with q0 - q1 = -g: q0 carries
// the negative part plus a point mass at 0, q1 the positive part plus the
// same point mass. Throws infeasible_error when l1_norm(g) > 2.
std::pair<SignedAtomicMeasure, SignedAtomicMeasure> jordan_split(
    const SignedAtomicMeasure& g);

// Largest window scale multiplier c in (0, 1] keeping l1_norm <= 2.
double feasibility_frontier(double epsilon, double alpha,
                            double tol = 1e-4);

// Periodized window transform: images within 3 lattice steps of omega.
// Throws infeasible_error when adjacent bands overlap (w >= 1/(4 epsilon)).
double periodized_window_hat(double w, double epsilon, double omega);

// Pair of contaminated models at means +/- epsilon/2 whose observed CFs agree
// on the frequency bands around the scaled integer lattice.
struct HardInstancePair {
  BaseDistribution base;
  double epsilon = 0.0;
  double alpha = 0.0;
  double window_scale = 0.0;  // c
  double w = 0.0;             // c alpha / epsilon
  double mix_mass = 0.0;      // common outlier mixing mass l1_norm(g)/2
  SignedAtomicMeasure g, q0, q1;

  // (1-alpha)(e^{pi i eps w} - e^{-pi i eps w}) + alpha (cf_q0 - cf_q1).
  std::complex<double> shift_mixture_cf_gap(double omega) const;
  // The gap above multiplied by the base CF.
  std::complex<double> observed_cf_gap(double omega) const;

  nlohmann::json to_json() const;
  static HardInstancePair from_json(const nlohmann::json& j);
};

HardInstancePair build_hard_instance(const BaseDistribution& base,
                                     double epsilon, double alpha,
                                     std::optional<double> window_scale = {},
                                     std::optional<std::size_t> truncation_index = {});

struct TvBound {
  double certified = 0.0;     // Fourier-route upper bound on the TV distance
  double direct = 0.0;        // quadrature value of (1/2) || p0 - p1 ||_1
  double direct_error = 0.0;  // quadrature error estimate plus neglected tails
  double split_radius = 0.0;  // spatial cut used by the certified route
  double gap_l2 = 0.0;        // L2 bound on the observed CF gap
};

// Certified and direct total variation between the pair's observed laws.
TvBound tv_distance(const HardInstancePair& inst, double quad_tol = 1e-8);

// Smallest n with (1 - tv)^n <= ... below a constant separation probability:
// ceil(log(3/2) / tv); nullopt when tv <= 0 (no finite sample size suffices).
std::optional<std::uint64_t> sample_lower_bound_from_tv(double tv);

}  // namespace meanshift
