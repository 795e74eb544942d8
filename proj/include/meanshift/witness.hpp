#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "meanshift/cover.hpp"
#include "meanshift/distributions.hpp"

namespace meanshift {

// A frequency at which the shift direction is visible: |sin(pi <v, w>)| is
// large while the base CF magnitude stays bounded away from zero.
struct Witness {
  bool found = false;
  std::vector<double> omega;
  double sin_value = 0.0;
  double cf_magnitude = 0.0;

  nlohmann::json to_json() const;
};

// Closed-form candidates for Gaussian/Laplace, interval scans for the box
// kinds, then a grid scan fallback; sin_level = 0 short-circuits to w = 0.
// Grid ties break toward the lexicographically smallest point.
Witness find_witness(const BaseDistribution& dist, std::span<const double> v,
                     double sin_level, double cf_level, const Cover& grid);

// Scan restricted to the grid.
Witness find_witness_on_grid(const BaseDistribution& dist,
                             std::span<const double> v, double sin_level,
                             double cf_level, const Cover& grid);

struct LineScan {
  double max = 8.0;          // scan upper end for the radial parameter
  std::size_t count = 4096;  // uniform scan points per direction
};

// min over unit directions u of max over feasible radial frequencies t of
// |cf(t u)|, where t is feasible when dist(t * epsilon, Z) >= alpha. The scan
// always includes the feasibility boundary points and band midpoints.
struct ShiftVisibility {
  double value = 0.0;
  bool feasible = false;  // false when no scanned frequency was feasible
  std::vector<double> direction;  // minimizing unit direction
  double radial = 0.0;            // maximizing feasible t for that direction
};
ShiftVisibility shift_visibility(const BaseDistribution& dist, double epsilon,
                                 double alpha,
                                 const std::vector<std::vector<double>>& directions,
                                 const LineScan& scan = {});

// Unit directions obtained by normalizing a grid cover of the unit ball.
std::vector<std::vector<double>> sphere_directions(int dim, double resolution);

// sqrt of twice the integral of |cf|^2 over the nonnegative frequencies
// at lattice distance >= band_halfwidth from epsilon^-1 Z, cut at omega_max,
// plus a certified bound on the omega > omega_max remainder. Univariate.
double band_l2_mass(const BaseDistribution& dist, double epsilon,
                    double band_halfwidth, double omega_max, double quad_step);

// L2 norm of the base CF over the whole line (univariate, certified tail).
double cf_l2_norm(const BaseDistribution& dist, double omega_max,
                  double quad_step);

struct IntervalSet {
  std::vector<std::pair<double, double>> intervals;  // disjoint, sorted
};

// Checks the working inequality "L2 <= 4 sqrt(Linfty * deriv_l1)" for the
// base CF restricted to the given frequency set.
struct L2LinftyReport {
  double l2 = 0.0;
  double linfty = 0.0;
  double bound = 0.0;
  bool ok = false;
};
L2LinftyReport l2_linfty_check(const BaseDistribution& dist,
                               const IntervalSet& set);

}  // namespace meanshift
