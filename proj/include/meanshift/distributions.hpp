#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace meanshift {

class Rng;

// Characteristic function convention throughout: cf(w) = E exp(2 pi i <w, x>).
inline constexpr double kTwoPi = 6.2831853071795864769;

// sin(pi x) / (pi x); even; series branch keeps full precision near 0.
double sinc(double x);

enum class DistKind { gaussian, laplace, uniform, uniform_conv };

std::string kind_name(DistKind k);
DistKind kind_from_name(const std::string& name);

// Constants consumed by the tournament and the certificates:
//   deriv_l1:   bound on max_j || d/dx_j density ||_L1 (drives CF decay)
//   tail_sigma: Pr[|x| >= r] <= tail_sigma / r for each preset (univariate)
struct RegularityConstants {
  double deriv_l1 = 0.0;
  double tail_sigma = 0.0;
};

// Centered noise presets. All have product structure across coordinates.
class BaseDistribution {
 public:
  static BaseDistribution gaussian(int dim);      // iid standard normal
  static BaseDistribution laplace(int dim);       // iid, scale 1/sqrt(2), unit variance
  static BaseDistribution uniform();              // Uniform[-1, 1]
  static BaseDistribution uniform_conv(int fold); // sum of `fold` iid Uniform[-1, 1]

  DistKind kind() const { return kind_; }
  int dim() const { return dim_; }
  int fold() const { return fold_; }  // 1 unless kind == uniform_conv

  std::complex<double> cf(std::span<const double> omega) const;
  std::complex<double> cf1(double omega) const;  // univariate shortcut

  // Univariate density; throws std::invalid_argument when dim() > 1.
  double density(double x) const;

  // Half-width outside which the density is zero (box kinds) or below 1e-18.
  double effective_support() const;

  // Appends n draws (n * dim() doubles, sample-major). Words consumed per
  // sample: gaussian 2*dim, laplace dim, uniform 1, uniform_conv fold.
  void sample(Rng& rng, std::size_t n, std::vector<double>& out) const;

  RegularityConstants constants() const;

  // Certified bound on |grad cf| over the ball of given frequency radius.
  double cf_lipschitz(double radius) const;

  nlohmann::json to_json() const;
  static BaseDistribution from_json(const nlohmann::json& j);

  bool operator==(const BaseDistribution&) const = default;

 private:
  BaseDistribution(DistKind k, int dim, int fold);
  DistKind kind_;
  int dim_;
  int fold_;
};

// Density of the sum of `fold` iid Uniform[-1, 1] variables.
double uniform_sum_density(int fold, double x);

// CDF of the sum of 3 iid Uniform[0, 1] variables, evaluated piecewise.
double unit_sum3_cdf(double y);

}  // namespace meanshift
