#include "meanshift/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "meanshift/errors.hpp"
#include "meanshift/witness.hpp"

namespace meanshift {

namespace {

constexpr double kPi = 3.14159265358979323846;

double margin(const EstimatorConfig& cfg) {
  return (1.0 - cfg.alpha) * cfg.sin_level - 2.0 * cfg.alpha;
}

}  // namespace

void EstimatorConfig::validate(int dim) const {
  if (dim < 1 || dim > 3)
    throw std::invalid_argument("config: dim must be 1, 2, or 3");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("config: epsilon must lie in (0, 1)");
  if (!(alpha > 0.0 && alpha < 0.5))
    throw std::invalid_argument("config: alpha must lie in (0, 1/2)");
  if (!(radius > 1.0))
    throw std::invalid_argument("config: radius must exceed 1");
  if (!(sin_level > 0.0 && sin_level <= 1.0))
    throw std::invalid_argument("config: sin_level must lie in (0, 1]");
  if (!(cf_level > 0.0 && cf_level <= 1.0))
    throw std::invalid_argument("config: cf_level must lie in (0, 1]");
  if (!(cf_slope > 0.0))
    throw std::invalid_argument("config: cf_slope must be positive");
  if (!(deriv_l1 > 0.0))
    throw std::invalid_argument("config: deriv_l1 must be positive");
  if (!(budget_constant > 0.0))
    throw std::invalid_argument("config: budget_constant must be positive");
  if (!(margin(*this) > 0.0))
    throw std::invalid_argument(
        "config: need (1-alpha)*sin_level > 2*alpha for a positive margin");
  if (!candidate_offset.empty() &&
      candidate_offset.size() != static_cast<std::size_t>(dim))
    throw std::invalid_argument("config: candidate_offset dimension mismatch");
  if (cf_mode == CfMode::empirical) {
    const double need = 100.0 / (cf_level * cf_level);
    if (static_cast<double>(clean_count) <= need)
      throw std::invalid_argument(
          "config: empirical mode needs clean_count > (10/cf_level)^2");
  }
}

double candidate_resolution(const EstimatorConfig& cfg, int dim) {
  const double b = witness_norm_bound(cfg.deriv_l1, cfg.cf_level, dim);
  const double a = cfg.alpha / (2.0 * (1.0 - cfg.alpha) * kPi * b);
  const double m = 0.5 * margin(cfg) / (4.0 * (1.0 - cfg.alpha) * kPi * b);
  return std::min({a, m, cfg.epsilon});
}

double frequency_resolution(const EstimatorConfig& cfg) {
  return std::min(cfg.cf_level / (2.0 * cfg.cf_slope),
                  cfg.sin_level / (kTwoPi * cfg.radius));
}

std::size_t sample_budget(const EstimatorConfig& cfg, int dim) {
  cfg.validate(dim);
  const double b = witness_norm_bound(cfg.deriv_l1, cfg.cf_level, dim);
  const double logarg =
      b * cfg.radius * cfg.cf_slope / (cfg.cf_level * cfg.sin_level);
  if (!(logarg > 1.0))
    throw std::invalid_argument("sample_budget: degenerate log argument");
  const double denom = margin(cfg) * cfg.cf_level;
  const double n = cfg.budget_constant * static_cast<double>(dim) *
                   std::log(logarg) / (denom * denom);
  if (n > 9e18) throw resource_error("sample_budget: overflow");
  return static_cast<std::size_t>(std::ceil(n - 1e-9));
}

std::vector<double> coordinate_median(std::span<const double> samples, int dim) {
  if (dim < 1 || samples.empty() || samples.size() % dim != 0)
    throw std::invalid_argument("coordinate_median: bad sample block");
  const std::size_t n = samples.size() / dim;
  std::vector<double> med(dim), col(n);
  for (int j = 0; j < dim; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = samples[i * dim + j];
    std::sort(col.begin(), col.end());
    med[j] = (n % 2) ? col[n / 2] : 0.5 * (col[n / 2 - 1] + col[n / 2]);
  }
  return med;
}

std::complex<double> empirical_cf(std::span<const double> samples, int dim,
                                  std::span<const double> omega) {
  if (dim < 1 || samples.empty() || samples.size() % dim != 0 ||
      omega.size() != static_cast<std::size_t>(dim))
    throw std::invalid_argument("empirical_cf: bad arguments");
  const std::size_t n = samples.size() / dim;
  double re = 0.0, im = 0.0, cre = 0.0, cim = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dot = 0.0;
    for (int j = 0; j < dim; ++j) dot += omega[j] * samples[i * dim + j];
    const double t = kTwoPi * dot;
    // Kahan update on both parts.
    const double yr = std::cos(t) - cre;
    const double tr = re + yr;
    cre = (tr - re) - yr;
    re = tr;
    const double yi = std::sin(t) - cim;
    const double ti = im + yi;
    cim = (ti - im) - yi;
    im = ti;
  }
  return {re / static_cast<double>(n), im / static_cast<double>(n)};
}

namespace detail {

std::vector<std::complex<double>> ecf_grid_1d(std::span<const double> xs,
                                              double pitch,
                                              const std::vector<long long>& ks) {
  if (ks.empty()) return {};
  const long long kmin = ks.front();
  const long long kmax = ks.back();
  std::vector<double> re(ks.size(), 0.0), im(ks.size(), 0.0);
  std::vector<double> cre(ks.size(), 0.0), cim(ks.size(), 0.0);
  std::vector<std::size_t> slot(static_cast<std::size_t>(kmax - kmin) + 1,
                                SIZE_MAX);
  for (std::size_t j = 0; j < ks.size(); ++j)
    slot[static_cast<std::size_t>(ks[j] - kmin)] = j;
  for (double x : xs) {
    const double theta = kTwoPi * pitch * x;
    const double rr = std::cos(theta);
    const double ri = std::sin(theta);
    double cr = std::cos(theta * static_cast<double>(kmin));
    double ci = std::sin(theta * static_cast<double>(kmin));
    for (long long k = kmin; k <= kmax; ++k) {
      const std::size_t j = slot[static_cast<std::size_t>(k - kmin)];
      if (j != SIZE_MAX) {
        const double yr = cr - cre[j];
        const double tr = re[j] + yr;
        cre[j] = (tr - re[j]) - yr;
        re[j] = tr;
        const double yi = ci - cim[j];
        const double ti = im[j] + yi;
        cim[j] = (ti - im[j]) - yi;
        im[j] = ti;
      }
      const double nr = cr * rr - ci * ri;
      ci = cr * ri + ci * rr;
      cr = nr;
    }
  }
  std::vector<std::complex<double>> out(ks.size());
  const double inv = 1.0 / static_cast<double>(xs.size());
  for (std::size_t j = 0; j < ks.size(); ++j) out[j] = {re[j] * inv, im[j] * inv};
  return out;
}

std::vector<std::size_t> select_search_set(
    const std::vector<std::complex<double>>& cf_values, double threshold) {
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < cf_values.size(); ++j)
    if (std::abs(cf_values[j]) >= threshold) idx.push_back(j);
  return idx;
}

}  // namespace detail

nlohmann::json EstimatorConfig::to_json() const {
  nlohmann::json j;
  j["version"] = 1;
  j["epsilon"] = epsilon;
  j["alpha"] = alpha;
  j["radius"] = radius;
  j["sin_level"] = sin_level;
  j["cf_level"] = cf_level;
  j["cf_slope"] = cf_slope;
  j["deriv_l1"] = deriv_l1;
  j["budget_constant"] = budget_constant;
  j["cf_mode"] = cf_mode == CfMode::oracle ? "oracle" : "empirical";
  j["clean_count"] = clean_count;
  j["cover_cap"] = cover_cap;
  j["precenter"] = precenter;
  if (!candidate_offset.empty()) j["candidate_offset"] = candidate_offset;
  j["trace"] = trace;
  return j;
}

EstimatorConfig EstimatorConfig::from_json(const nlohmann::json& j) {
  if (j.value("version", 0) != 1)
    throw std::invalid_argument("estimator config: unsupported version");
  EstimatorConfig c;
  c.epsilon = j.at("epsilon").get<double>();
  c.alpha = j.at("alpha").get<double>();
  c.radius = j.value("radius", 1.5);
  c.sin_level = j.at("sin_level").get<double>();
  c.cf_level = j.at("cf_level").get<double>();
  c.cf_slope = j.at("cf_slope").get<double>();
  c.deriv_l1 = j.at("deriv_l1").get<double>();
  c.budget_constant = j.value("budget_constant", 64.0);
  const std::string mode = j.value("cf_mode", "oracle");
  if (mode == "oracle") {
    c.cf_mode = CfMode::oracle;
  } else if (mode == "empirical") {
    c.cf_mode = CfMode::empirical;
  } else {
    throw std::invalid_argument("estimator config: bad cf_mode");
  }
  c.clean_count = j.value("clean_count", std::size_t{0});
  c.cover_cap = j.value("cover_cap", std::size_t{10'000'000});
  c.precenter = j.value("precenter", true);
  if (j.contains("candidate_offset"))
    c.candidate_offset = j.at("candidate_offset").get<std::vector<double>>();
  c.trace = j.value("trace", false);
  return c;
}

nlohmann::json EstimateReport::to_json() const {
  nlohmann::json j;
  j["mean"] = mean;
  j["score"] = score;
  j["samples_used"] = samples_used;
  j["candidate_count"] = candidate_count;
  j["frequency_count"] = frequency_count;
  j["search_set_size"] = search_set_size;
  j["search_set_empty"] = search_set_empty;
  j["precenter_shift"] = precenter_shift;
  if (!candidate_scores.empty()) j["candidate_scores"] = candidate_scores;
  return j;
}

EstimateReport estimate(const EstimatorConfig& cfg, const BaseDistribution& dist,
                        std::span<const double> samples,
                        std::span<const double> clean_samples) {
  const int d = dist.dim();
  cfg.validate(d);
  if (samples.empty() || samples.size() % static_cast<std::size_t>(d) != 0)
    throw std::invalid_argument("estimate: bad sample block");
  if (cfg.cf_mode == CfMode::empirical &&
      clean_samples.size() < cfg.clean_count * static_cast<std::size_t>(d))
    throw std::invalid_argument("estimate: not enough clean reference draws");

  const std::size_t n = samples.size() / static_cast<std::size_t>(d);
  EstimateReport rep;
  rep.samples_used = n;
  rep.precenter_shift.assign(d, 0.0);
  std::vector<double> work(samples.begin(), samples.end());
  if (cfg.precenter) {
    rep.precenter_shift = coordinate_median(samples, d);
    for (std::size_t i = 0; i < work.size(); ++i)
      work[i] -= rep.precenter_shift[i % static_cast<std::size_t>(d)];
  }

  const double b = witness_norm_bound(cfg.deriv_l1, cfg.cf_level, d);
  const double mu_res = candidate_resolution(cfg, d);
  const double om_res = frequency_resolution(cfg);
  Cover mu_cover = build_cover(cfg.radius, mu_res, d, cfg.cover_cap);
  if (!cfg.candidate_offset.empty()) {
    for (auto& p : mu_cover.points)
      for (int j = 0; j < d; ++j) p[j] += cfg.candidate_offset[j];
  }
  Cover om_cover = build_cover(b, om_res, d, cfg.cover_cap);
  rep.candidate_count = mu_cover.points.size();
  rep.frequency_count = om_cover.points.size();

  // Base CF on the frequency grid: exact, or from reference draws.
  std::vector<std::complex<double>> base_cf(om_cover.points.size());
  const std::size_t m = cfg.clean_count;
  std::span<const double> clean =
      cfg.cf_mode == CfMode::empirical
          ? clean_samples.first(m * static_cast<std::size_t>(d))
          : std::span<const double>{};
  const double om_pitch = 2.0 * om_res / std::sqrt(static_cast<double>(d));
  if (cfg.cf_mode == CfMode::oracle) {
    for (std::size_t j = 0; j < om_cover.points.size(); ++j)
      base_cf[j] = dist.cf(om_cover.points[j]);
  } else if (d == 1) {
    std::vector<long long> ks(om_cover.points.size());
    for (std::size_t j = 0; j < ks.size(); ++j)
      ks[j] = std::llround(om_cover.points[j][0] / om_pitch);
    base_cf = detail::ecf_grid_1d(clean, om_pitch, ks);
  } else {
    for (std::size_t j = 0; j < om_cover.points.size(); ++j)
      base_cf[j] = empirical_cf(clean, d, om_cover.points[j]);
  }

  double threshold = cfg.cf_level / 2.0;
  if (cfg.cf_mode == CfMode::empirical)
    threshold -= 5.0 / std::sqrt(static_cast<double>(m));
  const std::vector<std::size_t> search =
      detail::select_search_set(base_cf, threshold);
  rep.search_set_size = search.size();
  rep.search_set_empty = search.empty();

  // Normalized empirical CF on the search set.
  std::vector<std::complex<double>> psi(search.size());
  if (!search.empty()) {
    if (d == 1) {
      std::vector<long long> ks(search.size());
      for (std::size_t j = 0; j < search.size(); ++j)
        ks[j] = std::llround(om_cover.points[search[j]][0] / om_pitch);
      const auto obs = detail::ecf_grid_1d(work, om_pitch, ks);
      for (std::size_t j = 0; j < search.size(); ++j)
        psi[j] = obs[j] / base_cf[search[j]];
    } else {
      for (std::size_t j = 0; j < search.size(); ++j)
        psi[j] = empirical_cf(work, d, om_cover.points[search[j]]) /
                 base_cf[search[j]];
    }
  }

  // Tournament: worst frequency mismatch per candidate, keep the minimum.
  const double oma = 1.0 - cfg.alpha;
  std::vector<double> scores(mu_cover.points.size(), 0.0);
  if (!search.empty()) {
    if (d == 1) {
      for (std::size_t j = 0; j < search.size(); ++j) {
        const double w = om_cover.points[search[j]][0];
        const double c0 = mu_cover.points.front()[0];
        const double step = mu_cover.points.size() > 1
                                ? mu_cover.points[1][0] - c0
                                : 0.0;
        const double rr = std::cos(kTwoPi * w * step);
        const double ri = std::sin(kTwoPi * w * step);
        double pr = std::cos(kTwoPi * w * c0);
        double pi = std::sin(kTwoPi * w * c0);
        for (std::size_t i = 0; i < scores.size(); ++i) {
          const double dr = oma * pr - psi[j].real();
          const double di = oma * pi - psi[j].imag();
          const double mag = std::sqrt(dr * dr + di * di);
          if (mag > scores[i]) scores[i] = mag;
          const double nr = pr * rr - pi * ri;
          pi = pr * ri + pi * rr;
          pr = nr;
        }
      }
    } else {
      for (std::size_t i = 0; i < mu_cover.points.size(); ++i) {
        const auto& c = mu_cover.points[i];
        double worst = 0.0;
        for (std::size_t j = 0; j < search.size(); ++j) {
          const auto& w = om_cover.points[search[j]];
          double dot = 0.0;
          for (int t = 0; t < d; ++t) dot += w[t] * c[t];
          const std::complex<double> tstat =
              oma * std::complex<double>{std::cos(kTwoPi * dot),
                                         std::sin(kTwoPi * dot)} -
              psi[j];
          worst = std::max(worst, std::abs(tstat));
        }
        scores[i] = worst;
      }
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] < scores[best]) best = i;
  rep.score = scores.empty() ? 0.0 : scores[best];
  rep.mean.assign(d, 0.0);
  for (int j = 0; j < d; ++j)
    rep.mean[j] = mu_cover.points[best][j] + rep.precenter_shift[j];
  if (cfg.trace) rep.candidate_scores = std::move(scores);
  return rep;
}

EstimatorConfig preset_config(const BaseDistribution& dist, double alpha,
                              double epsilon, double radius,
                              double budget_constant, double cf_level_floor) {
  if (!(alpha > 0.0 && alpha < 1.0 / 3.0))
    throw std::invalid_argument("preset_config: alpha must lie in (0, 1/3)");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("preset_config: epsilon must lie in (0, 1)");
  EstimatorConfig cfg;
  cfg.epsilon = epsilon;
  cfg.alpha = alpha;
  cfg.radius = radius;
  cfg.budget_constant = budget_constant;
  cfg.deriv_l1 = dist.constants().deriv_l1;

  // Largest natural sine level; fall back to the midpoint of the feasible
  // range ((2 alpha / (1 - alpha), 1]) when that is infeasible or above 1.
  const double natural =
      dist.kind() == DistKind::uniform ? 1.0 / std::sqrt(2.0) : 4.0 * alpha;
  const double lower = 2.0 * alpha / (1.0 - alpha);
  cfg.sin_level = (natural <= 1.0 && natural > lower)
                      ? natural
                      : 0.5 * (lower + 1.0);

  const double theta = std::asin(std::min(cfg.sin_level, 1.0));
  const double om_star = theta / (kPi * epsilon);
  double level = 0.0;
  switch (dist.kind()) {
    case DistKind::gaussian:
      level = std::exp(-2.0 * kPi * kPi * om_star * om_star);
      break;
    case DistKind::laplace:
      level = 1.0 / (1.0 + 2.0 * kPi * kPi * om_star * om_star);
      break;
    case DistKind::uniform:
      level = epsilon / (3.0 * kPi);
      break;
    case DistKind::uniform_conv: {
      // Worst achievable witness magnitude over the relevant shift scales.
      Cover none;
      none.dim = 1;
      level = 1.0;
      for (int i = 0; i <= 48; ++i) {
        const double v =
            epsilon + (2.0 * radius - epsilon) * static_cast<double>(i) / 48.0;
        const double vv[1] = {v};
        Witness w = find_witness(dist, vv, cfg.sin_level, 1e-12, none);
        level = w.found ? std::min(level, w.cf_magnitude) : cf_level_floor;
      }
      level *= 0.95;
      break;
    }
  }
  cfg.cf_level = std::min(std::max(level, cf_level_floor), 0.95);
  if (!(cfg.cf_level > 0.0))
    throw std::invalid_argument("preset_config: cf_level collapsed to zero");
  cfg.cf_slope =
      dist.cf_lipschitz(witness_norm_bound(cfg.deriv_l1, cfg.cf_level, dist.dim()));
  cfg.validate(dist.dim());
  return cfg;
}

}  // namespace meanshift
