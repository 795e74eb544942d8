#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "meanshift/contamination.hpp"
#include "meanshift/cover.hpp"
#include "meanshift/errors.hpp"
#include "meanshift/estimator.hpp"
#include "meanshift/rng.hpp"
#include "meanshift/witness.hpp"

using namespace meanshift;

namespace {

constexpr double kTau = 6.28318530717958647693;

EstimatorConfig synthetic_config() {
  // Hand-picked so every factor of the budget formula is a round number:
  // bound = 1, log argument = e, margin = 0.1, so n = 1e4 exactly.
  EstimatorConfig cfg;
  cfg.epsilon = 0.5;
  cfg.alpha = 0.2;
  cfg.sin_level = 0.625;
  cfg.cf_level = 0.1;
  cfg.deriv_l1 = 0.2 * 3.14159265358979323846;
  cfg.radius = 1.5;
  cfg.cf_slope = std::exp(1.0) / 24.0;
  cfg.budget_constant = 1.0;
  return cfg;
}

ContaminationModel gaussian_point_model(double mu, double alpha, double shift) {
  return ContaminationModel{BaseDistribution::gaussian(1),
                            {mu},
                            alpha,
                            PointShift{{shift}}};
}

}  // namespace

TEST_CASE("coordinate median basics and errors") {
  const std::vector<double> odd = {3.0, 1.0, 2.0};
  CHECK(coordinate_median(odd, 1) == std::vector<double>{2.0});
  const std::vector<double> even = {1.0, 2.0, 3.0, 4.0};
  CHECK(coordinate_median(even, 1) == std::vector<double>{2.5});
  const std::vector<double> planar = {1.0, 10.0, 3.0, 30.0, 2.0, 20.0};
  CHECK(coordinate_median(planar, 2) == std::vector<double>{2.0, 20.0});
  CHECK_THROWS_AS(coordinate_median({}, 1), std::invalid_argument);
  CHECK_THROWS_AS(coordinate_median(odd, 2), std::invalid_argument);
  CHECK_THROWS_AS(coordinate_median(odd, 0), std::invalid_argument);
}

TEST_CASE("empirical cf worked examples") {
  const double w1[1] = {0.7};
  const std::vector<double> origin = {0.0};
  CHECK(empirical_cf(origin, 1, w1) == std::complex<double>{1.0, 0.0});

  const std::vector<double> pair = {0.25, -0.25};
  const double wu[1] = {1.0};
  CHECK(std::abs(empirical_cf(pair, 1, wu)) < 1e-15);

  const std::vector<double> ones = {1.0, 1.0, 1.0};
  const double wh[1] = {0.5};
  const auto z = empirical_cf(ones, 1, wh);
  CHECK(z.real() == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(std::abs(z.imag()) < 1e-12);

  const double w2[2] = {0.3, -0.4};
  const std::vector<double> pt = {1.0, 2.0};
  const auto z2 = empirical_cf(pt, 2, w2);
  const double phase = kTau * (0.3 * 1.0 - 0.4 * 2.0);
  CHECK(z2.real() == doctest::Approx(std::cos(phase)).epsilon(1e-14));
  CHECK(z2.imag() == doctest::Approx(std::sin(phase)).epsilon(1e-14));

  CHECK_THROWS_AS(empirical_cf({}, 1, w1), std::invalid_argument);
  CHECK_THROWS_AS(empirical_cf(pt, 2, w1), std::invalid_argument);
}

TEST_CASE("phase-recurrence grid cf matches the direct sum") {
  Rng rng(91);
  std::vector<double> xs(100000);
  for (auto& x : xs) x = 3.0 * rng.uniform_pm1();

  const double pitch = 0.0625;
  // Gap in the index list exercises the missing-slot path.
  const std::vector<long long> ks = {-5, -1, 0, 2, 7};
  const auto grid = detail::ecf_grid_1d(xs, pitch, ks);
  REQUIRE(grid.size() == ks.size());
  for (std::size_t j = 0; j < ks.size(); ++j) {
    const double w[1] = {pitch * static_cast<double>(ks[j])};
    const auto direct = empirical_cf(xs, 1, w);
    CHECK(std::abs(grid[j] - direct) < 1e-11);
  }
  CHECK(grid[2].real() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(grid[2].imag()) < 1e-14);
  CHECK(detail::ecf_grid_1d(xs, pitch, {}).empty());
}

TEST_CASE("search set selection by magnitude threshold") {
  const std::vector<std::complex<double>> vals = {
      {0.3, 0.0}, {0.0, 0.05}, {-0.4, 0.3}};
  CHECK(detail::select_search_set(vals, 0.1) ==
        std::vector<std::size_t>{0, 2});
  CHECK(detail::select_search_set(vals, 0.04) ==
        std::vector<std::size_t>{0, 1, 2});
  CHECK(detail::select_search_set(vals, 0.9).empty());
}

TEST_CASE("sample budget: synthetic round number and scaling") {
  const EstimatorConfig cfg = synthetic_config();
  CHECK(witness_norm_bound(cfg.deriv_l1, cfg.cf_level, 1) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sample_budget(cfg, 1) == 10000);

  // Halving the floor level at least triples the budget (quadratic in the
  // level times a growing log factor).
  EstimatorConfig tight = cfg;
  tight.cf_level = 0.05;
  CHECK(sample_budget(tight, 1) >= 3 * sample_budget(cfg, 1));

  EstimatorConfig cheap = cfg;
  cheap.budget_constant = 2.0;
  CHECK(sample_budget(cheap, 1) == 2 * sample_budget(cfg, 1));
}

TEST_CASE("sample budget failure modes") {
  EstimatorConfig degenerate = synthetic_config();
  degenerate.cf_slope = 0.01;
  degenerate.cf_level = 0.5;
  CHECK_THROWS_AS(sample_budget(degenerate, 1), std::invalid_argument);

  EstimatorConfig huge = synthetic_config();
  huge.cf_level = 1e-8;
  CHECK_THROWS_AS(sample_budget(huge, 1), resource_error);
}

TEST_CASE("config validation rejects out-of-range settings") {
  const EstimatorConfig good = synthetic_config();
  CHECK_NOTHROW(good.validate(1));

  EstimatorConfig c = good;
  c.epsilon = 1.5;
  CHECK_THROWS_AS(c.validate(1), std::invalid_argument);

  c = good;
  c.alpha = 0.3;
  c.sin_level = 0.8;  // margin = 0.7*0.8 - 0.6 < 0
  CHECK_THROWS_AS(c.validate(1), std::invalid_argument);

  c = good;
  c.radius = 1.0;
  CHECK_THROWS_AS(c.validate(1), std::invalid_argument);

  c = good;
  c.cf_mode = CfMode::empirical;
  c.clean_count = 9999;  // needs strictly more than (10/cf_level)^2
  CHECK_THROWS_AS(c.validate(1), std::invalid_argument);
  c.clean_count = 10001;
  CHECK_NOTHROW(c.validate(1));

  c = good;
  c.candidate_offset = {0.1, 0.2};
  CHECK_THROWS_AS(c.validate(1), std::invalid_argument);
  CHECK_NOTHROW(c.validate(2));

  CHECK_THROWS_AS(good.validate(4), std::invalid_argument);
}

TEST_CASE("gaussian preset constants") {
  const auto g = BaseDistribution::gaussian(1);
  const EstimatorConfig cfg = preset_config(g, 0.1, 0.5);
  CHECK(cfg.sin_level == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(cfg.cf_level ==
        doctest::Approx(0.25800690863121629).epsilon(1e-13));
  CHECK(cfg.deriv_l1 == doctest::Approx(std::sqrt(2.0 / kTau * 2.0)));
  const double b = witness_norm_bound(cfg.deriv_l1, cfg.cf_level, 1);
  CHECK(cfg.cf_slope == doctest::Approx(g.cf_lipschitz(b)).epsilon(1e-14));
  CHECK(sample_budget(cfg, 1) == 124141);

  // Resolutions follow the documented min-formulas.
  CHECK(candidate_resolution(cfg, 1) ==
        doctest::Approx(0.014371720271669864).epsilon(1e-12));
  CHECK(frequency_resolution(cfg) ==
        doctest::Approx(0.033850782481443093).epsilon(1e-12));
}

TEST_CASE("uniform preset floors the cf level") {
  const auto u = BaseDistribution::uniform();
  const EstimatorConfig cfg = preset_config(u, 0.1, 0.3);
  CHECK(cfg.sin_level == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  // The natural level eps/(3 pi) ~ 0.0318 sits below the default floor.
  CHECK(cfg.cf_level == 0.08);
  const EstimatorConfig wide = preset_config(u, 0.1, 0.9);
  CHECK(wide.cf_level == doctest::Approx(0.9 / (3.0 * kTau / 2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(preset_config(u, 0.34, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(preset_config(u, 0.1, 1.0), std::invalid_argument);
}

TEST_CASE("estimate recovers a shifted gaussian mean across seeds") {
  const auto g = BaseDistribution::gaussian(1);
  const EstimatorConfig cfg = preset_config(g, 0.1, 0.5);
  const std::size_t n = sample_budget(cfg, 1);
  const ContaminationModel model = gaussian_point_model(0.3, 0.1, 5.0);

  for (std::uint64_t seed : {11u, 12u, 13u}) {
    Rng rng(seed);
    std::vector<double> xs;
    model.draw(rng, n, xs);
    const EstimateReport rep = estimate(cfg, g, xs);
    CHECK(rep.samples_used == n);
    CHECK(std::abs(rep.mean[0] - 0.3) <= cfg.epsilon);
    CHECK_FALSE(rep.search_set_empty);
    CHECK(rep.search_set_size >= 3);
    CHECK(rep.candidate_count > 50);
  }
}

TEST_CASE("estimate tolerates a clean model and repeated runs are identical") {
  const auto g = BaseDistribution::gaussian(1);
  const EstimatorConfig cfg = preset_config(g, 0.1, 0.5);
  const ContaminationModel model{g, {-0.4}, 0.1, NullAdversary{}};

  Rng rng(7);
  std::vector<double> xs;
  model.draw(rng, 40000, xs);
  const EstimateReport a = estimate(cfg, g, xs);
  const EstimateReport b = estimate(cfg, g, xs);
  CHECK(std::abs(a.mean[0] + 0.4) <= cfg.epsilon);
  CHECK(a.mean == b.mean);
  CHECK(a.score == b.score);
  CHECK(a.search_set_size == b.search_set_size);
}

TEST_CASE("candidate offset implements translation equivariance") {
  const auto g = BaseDistribution::gaussian(1);
  EstimatorConfig cfg = preset_config(g, 0.1, 0.5);
  cfg.precenter = false;

  Rng rng(21);
  std::vector<double> xs;
  gaussian_point_model(0.2, 0.1, 5.0).draw(rng, 20000, xs);
  const EstimateReport base = estimate(cfg, g, xs);

  const double c = 0.37;
  std::vector<double> shifted = xs;
  for (auto& x : shifted) x += c;
  EstimatorConfig moved = cfg;
  moved.candidate_offset = {c};
  const EstimateReport rep = estimate(moved, g, shifted);
  CHECK(rep.mean[0] == doctest::Approx(base.mean[0] + c).epsilon(1e-9));
  CHECK(rep.score == doctest::Approx(base.score).epsilon(1e-9));
}

TEST_CASE("precentering reports the median shift and stays on target") {
  const auto g = BaseDistribution::gaussian(1);
  const EstimatorConfig cfg = preset_config(g, 0.1, 0.5);
  // Mean far outside the candidate ball; precentering must absorb it.
  const ContaminationModel model = gaussian_point_model(25.0, 0.1, 5.0);
  Rng rng(5);
  std::vector<double> xs;
  model.draw(rng, 60000, xs);
  const EstimateReport rep = estimate(cfg, g, xs);
  CHECK(std::abs(rep.precenter_shift[0] - 25.0) < 0.5);
  CHECK(std::abs(rep.mean[0] - 25.0) <= cfg.epsilon);
}

TEST_CASE("trace mode exposes the per-candidate tournament scores") {
  const auto g = BaseDistribution::gaussian(1);
  EstimatorConfig cfg = preset_config(g, 0.1, 0.5);
  cfg.trace = true;
  Rng rng(3);
  std::vector<double> xs;
  gaussian_point_model(0.0, 0.1, 5.0).draw(rng, 20000, xs);
  const EstimateReport rep = estimate(cfg, g, xs);
  REQUIRE(rep.candidate_scores.size() == rep.candidate_count);
  const double best =
      *std::min_element(rep.candidate_scores.begin(), rep.candidate_scores.end());
  CHECK(rep.score == best);
}

TEST_CASE("estimate input guards") {
  const auto g = BaseDistribution::gaussian(1);
  const EstimatorConfig cfg = preset_config(g, 0.1, 0.5);
  CHECK_THROWS_AS(estimate(cfg, g, {}), std::invalid_argument);

  const auto g2 = BaseDistribution::gaussian(2);
  const EstimatorConfig cfg2 = preset_config(g2, 0.1, 0.5);
  const std::vector<double> odd_block = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS(estimate(cfg2, g2, odd_block), std::invalid_argument);

  EstimatorConfig emp = cfg;
  emp.cf_mode = CfMode::empirical;
  emp.clean_count = 4000;
  const std::vector<double> xs = {0.1, 0.2, 0.3};
  const std::vector<double> few(100, 0.0);
  CHECK_THROWS_AS(estimate(emp, g, xs, few), std::invalid_argument);
}

TEST_CASE("empirical reference mode matches the oracle-mode answer") {
  const auto g = BaseDistribution::gaussian(1);
  EstimatorConfig cfg = preset_config(g, 0.1, 0.5);
  const std::size_t n = sample_budget(cfg, 1);
  const ContaminationModel model = gaussian_point_model(0.3, 0.1, 5.0);

  Rng rng(17);
  std::vector<double> xs;
  model.draw(rng, n, xs);
  const EstimateReport oracle = estimate(cfg, g, xs);

  cfg.cf_mode = CfMode::empirical;
  cfg.clean_count = 40000;
  Rng clean_rng = Rng::substream(17, 1);
  std::vector<double> clean;
  g.sample(clean_rng, cfg.clean_count, clean);
  const EstimateReport emp = estimate(cfg, g, xs, clean);
  CHECK(std::abs(emp.mean[0] - 0.3) <= cfg.epsilon);
  // The reference-draw noise widens the search threshold, so the winner may
  // drift a few grid steps from the oracle pick but no further.
  CHECK(std::abs(emp.mean[0] - oracle.mean[0]) <=
        4.0 * candidate_resolution(cfg, 1) + 1e-12);
}

TEST_CASE("two-dimensional estimate stays within the target radius") {
  const auto g = BaseDistribution::gaussian(2);
  const EstimatorConfig cfg = preset_config(g, 0.1, 0.5);
  const ContaminationModel model{g, {0.3, -0.2}, 0.1, PointShift{{4.0, -3.0}}};

  Rng rng(29);
  std::vector<double> xs;
  model.draw(rng, 60000, xs);
  const EstimateReport rep = estimate(cfg, g, xs);
  REQUIRE(rep.mean.size() == 2);
  const double err = std::hypot(rep.mean[0] - 0.3, rep.mean[1] + 0.2);
  CHECK(err <= cfg.epsilon);
}

TEST_CASE("observed-cf deviation concentrates at the documented rate") {
  // At the full preset budget the worst-case empirical-minus-population cf
  // gap over the retained frequency set should sit below margin*level/4 in
  // at least 95 of 100 trials.
  const auto g = BaseDistribution::gaussian(1);
  const EstimatorConfig cfg = preset_config(g, 0.1, 0.5);
  const std::size_t n = sample_budget(cfg, 1);
  const ContaminationModel model = gaussian_point_model(0.3, 0.1, 5.0);

  const double b = witness_norm_bound(cfg.deriv_l1, cfg.cf_level, 1);
  const Cover freq = build_cover(b, frequency_resolution(cfg), 1);
  std::vector<double> retained;
  std::vector<std::complex<double>> pop;
  for (const auto& p : freq.points) {
    if (std::abs(g.cf(p)) >= cfg.cf_level / 2.0) {
      retained.push_back(p[0]);
      pop.push_back(model.observed_cf(p));
    }
  }
  REQUIRE(retained.size() >= 3);

  const double margin = (1.0 - cfg.alpha) * cfg.sin_level - 2.0 * cfg.alpha;
  const double bound = margin * cfg.cf_level / 4.0;
  CHECK(bound == doctest::Approx(0.010320276345248651).epsilon(1e-12));

  int hits = 0;
  std::vector<double> xs;
  for (int trial = 0; trial < 100; ++trial) {
    Rng rng(1000 + static_cast<std::uint64_t>(trial));
    xs.clear();
    model.draw(rng, n, xs);
    double worst = 0.0;
    for (std::size_t j = 0; j < retained.size(); ++j) {
      const double w[1] = {retained[j]};
      worst = std::max(worst, std::abs(empirical_cf(xs, 1, w) - pop[j]));
    }
    if (worst <= bound) ++hits;
  }
  CHECK(hits >= 95);
}

TEST_CASE("population tournament separates far candidates at the margin") {
  // With exact population cf data, a candidate offset by more than epsilon
  // scores above (1-alpha)*sin_level - alpha at some retained frequency,
  // while the true mean scores at most alpha + grid slack everywhere.
  const auto g = BaseDistribution::gaussian(1);
  const EstimatorConfig cfg = preset_config(g, 0.1, 0.5);
  const double b = witness_norm_bound(cfg.deriv_l1, cfg.cf_level, 1);
  const Cover freq = build_cover(b, frequency_resolution(cfg), 1);

  const double mu = 0.25;
  const ContaminationModel model = gaussian_point_model(mu, 0.1, 5.0);
  const double oma = 1.0 - cfg.alpha;

  auto score_of = [&](double cand) {
    double worst = 0.0;
    for (const auto& p : freq.points) {
      const auto base = g.cf(p);
      if (std::abs(base) < cfg.cf_level / 2.0) continue;
      const auto psi = model.observed_cf(p) / base;
      const double phase = kTau * p[0] * cand;
      const std::complex<double> t =
          oma * std::complex<double>{std::cos(phase), std::sin(phase)} - psi;
      worst = std::max(worst, std::abs(t));
    }
    return worst;
  };

  CHECK(score_of(mu) <= cfg.alpha + 1e-12);
  const double far = mu + 2.0 * cfg.epsilon;
  CHECK(score_of(far) >= oma * cfg.sin_level - cfg.alpha - 1e-10);
  CHECK(score_of(mu) < score_of(far));
}
