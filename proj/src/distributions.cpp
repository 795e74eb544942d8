#include "meanshift/distributions.hpp"

#include <cmath>
#include <stdexcept>

#include "meanshift/rng.hpp"

namespace meanshift {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Certified bounds on the 1D CF derivative sups (see tests for the numeric
// cross-checks). Uniform: sup |d sinc(2w)/dw| = 2.740611..., attained near
// w = 0.3313. Laplace: global sup 9*pi/(4*sqrt(6)) = 2.885790..., attained at
// w = 1/(sqrt(6)*pi); below that point 4*pi^2*w dominates the derivative.
constexpr double kUniformCfSlope = 2.7407;
constexpr double kLaplaceCfSlopeCap = 2.8861;

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

double sinc(double x) {
  const double t = kPi * x;
  if (std::abs(x) < 1e-4) {
    const double t2 = t * t;
    return 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
  }
  return std::sin(t) / t;
}

std::string kind_name(DistKind k) {
  switch (k) {
    case DistKind::gaussian: return "gaussian";
    case DistKind::laplace: return "laplace";
    case DistKind::uniform: return "uniform";
    case DistKind::uniform_conv: return "uniform_conv";
  }
  throw std::invalid_argument("kind_name: bad kind");
}

DistKind kind_from_name(const std::string& name) {
  if (name == "gaussian") return DistKind::gaussian;
  if (name == "laplace") return DistKind::laplace;
  if (name == "uniform") return DistKind::uniform;
  if (name == "uniform_conv") return DistKind::uniform_conv;
  throw std::invalid_argument("unknown distribution kind: " + name);
}

BaseDistribution::BaseDistribution(DistKind k, int dim, int fold)
    : kind_(k), dim_(dim), fold_(fold) {
  if (dim < 1) throw std::invalid_argument("distribution dim must be >= 1");
  if (fold < 1) throw std::invalid_argument("fold must be >= 1");
}

BaseDistribution BaseDistribution::gaussian(int dim) {
  return {DistKind::gaussian, dim, 1};
}
BaseDistribution BaseDistribution::laplace(int dim) {
  return {DistKind::laplace, dim, 1};
}
BaseDistribution BaseDistribution::uniform() {
  return {DistKind::uniform, 1, 1};
}
BaseDistribution BaseDistribution::uniform_conv(int fold) {
  return {DistKind::uniform_conv, 1, fold};
}

std::complex<double> BaseDistribution::cf(std::span<const double> omega) const {
  if (static_cast<int>(omega.size()) != dim_)
    throw std::invalid_argument("cf: frequency dimension mismatch");
  switch (kind_) {
    case DistKind::gaussian: {
      double s = 0.0;
      for (double w : omega) s += w * w;
      return {std::exp(-2.0 * kPi * kPi * s), 0.0};
    }
    case DistKind::laplace: {
      double p = 1.0;
      for (double w : omega) p /= 1.0 + 2.0 * kPi * kPi * w * w;
      return {p, 0.0};
    }
    case DistKind::uniform:
      return {sinc(2.0 * omega[0]), 0.0};
    case DistKind::uniform_conv:
      return {std::pow(sinc(2.0 * omega[0]), fold_), 0.0};
  }
  throw std::logic_error("cf: bad kind");
}

std::complex<double> BaseDistribution::cf1(double omega) const {
  return cf(std::span<const double>(&omega, 1));
}

double BaseDistribution::density(double x) const {
  if (dim_ != 1)
    throw std::invalid_argument("density: univariate only");
  switch (kind_) {
    case DistKind::gaussian:
      return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
    case DistKind::laplace: {
      const double b = 1.0 / std::sqrt(2.0);
      return std::exp(-std::abs(x) / b) / (2.0 * b);
    }
    case DistKind::uniform:
      return uniform_sum_density(1, x);
    case DistKind::uniform_conv:
      return uniform_sum_density(fold_, x);
  }
  throw std::logic_error("density: bad kind");
}

double BaseDistribution::effective_support() const {
  switch (kind_) {
    case DistKind::gaussian: return 9.5;   // pdf < 3e-21 beyond
    case DistKind::laplace: return 30.0;   // pdf < 3e-19 beyond
    case DistKind::uniform: return 1.0;
    case DistKind::uniform_conv: return static_cast<double>(fold_);
  }
  throw std::logic_error("effective_support: bad kind");
}

void BaseDistribution::sample(Rng& rng, std::size_t n,
                              std::vector<double>& out) const {
  out.reserve(out.size() + n * static_cast<std::size_t>(dim_));
  for (std::size_t i = 0; i < n; ++i) {
    switch (kind_) {
      case DistKind::gaussian:
        for (int j = 0; j < dim_; ++j) out.push_back(rng.gaussian());
        break;
      case DistKind::laplace:
        for (int j = 0; j < dim_; ++j)
          out.push_back(rng.laplace(1.0 / std::sqrt(2.0)));
        break;
      case DistKind::uniform:
        out.push_back(rng.uniform_pm1());
        break;
      case DistKind::uniform_conv: {
        double s = 0.0;
        for (int j = 0; j < fold_; ++j) s += rng.uniform_pm1();
        out.push_back(s);
        break;
      }
    }
  }
}

RegularityConstants BaseDistribution::constants() const {
  switch (kind_) {
    case DistKind::gaussian:
      return {std::sqrt(2.0 / kPi), std::sqrt(2.0 / kPi)};
    case DistKind::laplace:
      return {std::sqrt(2.0), 1.0};
    case DistKind::uniform:
      return {1.0, 1.0};
    case DistKind::uniform_conv:
      return {1.0, std::sqrt(static_cast<double>(fold_) / 3.0)};
  }
  throw std::logic_error("constants: bad kind");
}

double BaseDistribution::cf_lipschitz(double radius) const {
  if (!(radius >= 0.0)) throw std::invalid_argument("cf_lipschitz: radius < 0");
  switch (kind_) {
    case DistKind::gaussian:
      return kTwoPi * std::exp(-0.5);  // global sup of |cf'|
    case DistKind::laplace:
      return std::min(4.0 * kPi * kPi * radius, kLaplaceCfSlopeCap);
    case DistKind::uniform:
      return kUniformCfSlope;
    case DistKind::uniform_conv:
      return fold_ * kUniformCfSlope;
  }
  throw std::logic_error("cf_lipschitz: bad kind");
}

nlohmann::json BaseDistribution::to_json() const {
  nlohmann::json j;
  j["kind"] = kind_name(kind_);
  j["dim"] = dim_;
  if (kind_ == DistKind::uniform_conv) j["fold"] = fold_;
  return j;
}

BaseDistribution BaseDistribution::from_json(const nlohmann::json& j) {
  const DistKind k = kind_from_name(j.at("kind").get<std::string>());
  const int dim = j.value("dim", 1);
  switch (k) {
    case DistKind::gaussian: return gaussian(dim);
    case DistKind::laplace: return laplace(dim);
    case DistKind::uniform:
      if (dim != 1) throw std::invalid_argument("uniform: dim must be 1");
      return uniform();
    case DistKind::uniform_conv:
      if (dim != 1) throw std::invalid_argument("uniform_conv: dim must be 1");
      return uniform_conv(j.at("fold").get<int>());
  }
  throw std::invalid_argument("from_json: bad kind");
}

double uniform_sum_density(int fold, double x) {
  if (fold < 1) throw std::invalid_argument("uniform_sum_density: fold < 1");
  const double m = static_cast<double>(fold);
  if (std::abs(x) >= m) return 0.0;
  // Rescale to the sum of `fold` iid Uniform[0,1]: y = (x + m) / 2.
  const double y = (x + m) / 2.0;
  double fact = 1.0;
  for (int i = 2; i < fold; ++i) fact *= i;
  double s = 0.0;
  const int kmax = static_cast<int>(std::floor(y));
  for (int k = 0; k <= kmax; ++k) {
    const double term = binomial(fold, k) * std::pow(y - k, fold - 1);
    s += (k % 2 ? -term : term);
  }
  return s / fact / 2.0;
}

double unit_sum3_cdf(double y) {
  if (y <= 0.0) return 0.0;
  if (y >= 3.0) return 1.0;
  if (y <= 1.0) return y * y * y / 6.0;
  if (y <= 2.0)
    return (-2.0 * y * y * y / 3.0 + 3.0 * y * y - 3.0 * y) / 2.0 + 0.5;
  const double t = 3.0 - y;
  return 1.0 - t * t * t / 6.0;
}

}  // namespace meanshift
