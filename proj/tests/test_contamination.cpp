#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "meanshift/contamination.hpp"
#include "meanshift/distributions.hpp"
#include "meanshift/rng.hpp"

using namespace meanshift;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::complex<double> unit_phase(double t) {
  return {std::cos(kTwoPi * t), std::sin(kTwoPi * t)};
}

ContaminationModel gaussian_point_model(double alpha, double mu, double z) {
  ContaminationModel m{BaseDistribution::gaussian(1), {mu}, alpha,
                       PointShift{{z}}};
  m.validate();
  return m;
}

std::complex<double> ecf(std::span<const double> xs, int dim,
                         std::span<const double> omega) {
  std::complex<double> acc(0.0, 0.0);
  const std::size_t n = xs.size() / dim;
  for (std::size_t i = 0; i < n; ++i) {
    double dot = 0.0;
    for (int j = 0; j < dim; ++j) dot += omega[j] * xs[i * dim + j];
    acc += unit_phase(dot);
  }
  return acc / double(n);
}

}  // namespace

TEST_CASE("population cf identities") {
  const auto model = gaussian_point_model(0.1, 0.3, 5.0);
  Rng rng(4);
  for (int it = 0; it < 50; ++it) {
    const double w = 2.0 * rng.uniform_pm1();
    const double omega[1] = {w};
    const auto base = model.base.cf(omega);
    const auto want =
        base * (0.9 * unit_phase(0.3 * w) + 0.1 * unit_phase(5.0 * w));
    CHECK(std::abs(model.observed_cf(omega) - want) < 1e-14);
  }
  const double zero[1] = {0.0};
  CHECK(std::abs(model.observed_cf(zero) - std::complex<double>(1.0, 0.0)) <
        1e-15);

  // No contamination: the observed cf is the shifted base cf.
  ContaminationModel clean{BaseDistribution::gaussian(1), {0.3}, 0.0,
                           PointShift{{77.0}}};
  const double half[1] = {0.5};
  const auto want = std::exp(-2.0 * kPi * kPi * 0.25) * unit_phase(0.15);
  CHECK(std::abs(clean.observed_cf(half) - want) < 1e-15);

  // A null adversary collapses the mixture at every alpha.
  ContaminationModel null{BaseDistribution::laplace(1), {-0.4}, 0.25,
                          NullAdversary{}};
  for (double w : {0.1, 0.7, -1.3}) {
    const double om[1] = {w};
    const auto expect = null.base.cf(om) * unit_phase(-0.4 * w);
    CHECK(std::abs(null.observed_cf(om) - expect) < 1e-14);
  }
}

TEST_CASE("adversary cf closed forms") {
  const std::vector<double> mean{0.0};
  Rng rng(9);
  for (int it = 0; it < 20; ++it) {
    const double w = 1.5 * rng.uniform_pm1();
    const double om[1] = {w};

    MixtureOfPoints mix{{{{-1.0}, 0.25}, {{2.0}, 0.75}}};
    const auto mix_want = 0.25 * unit_phase(-w) + 0.75 * unit_phase(2.0 * w);
    CHECK(std::abs(adversary_cf(mix, om, mean) - mix_want) < 1e-15);

    AtomicMeasure1D atoms{{-0.5, 0.5, 1.5}, {0.2, 0.3, 0.5}};
    const auto atom_want = 0.2 * unit_phase(-0.5 * w) +
                           0.3 * unit_phase(0.5 * w) +
                           0.5 * unit_phase(1.5 * w);
    CHECK(std::abs(adversary_cf(atoms, om, mean) - atom_want) < 1e-15);

    const std::vector<double> mu{0.7};
    CHECK(std::abs(adversary_cf(NullAdversary{}, om, mu) -
                   unit_phase(0.7 * w)) < 1e-15);
  }
}

TEST_CASE("draws match the population cf for every adversary kind") {
  const std::size_t n = 100000;
  const double tol = 5.0 / std::sqrt(double(n));
  std::vector<Adversary> adversaries{
      PointShift{{4.0}},
      MixtureOfPoints{{{{-2.0}, 0.5}, {{3.0}, 0.5}}},
      AtomicMeasure1D{{-1.0, 0.0, 2.0}, {0.3, 0.4, 0.3}},
      NullAdversary{}};
  int seed = 100;
  for (const auto& adv : adversaries) {
    ContaminationModel m{BaseDistribution::laplace(1), {0.2}, 0.15, adv};
    m.validate();
    std::vector<double> xs;
    Rng rng(seed++);
    m.draw(rng, n, xs);
    Rng wrng(7);
    for (int it = 0; it < 20; ++it) {
      const double w = 1.2 * wrng.uniform_pm1();
      const double om[1] = {w};
      CHECK(std::abs(ecf(xs, 1, om) - m.observed_cf(om)) <= tol);
    }
  }
}

TEST_CASE("outlier fraction statistics") {
  const auto m = gaussian_point_model(0.2, 0.0, 5.0);
  std::vector<double> xs;
  Rng rng(31);
  const std::size_t n = 100000;
  m.draw(rng, n, xs);
  std::size_t above = 0;
  for (double x : xs) above += x > 2.5;
  CHECK(std::abs(double(above) / double(n) - 0.2) <= 0.01);

  // Clean fraction at wide separation.
  const auto far = gaussian_point_model(0.3, 0.0, 10.0);
  xs.clear();
  Rng rng2(32);
  far.draw(rng2, n, xs);
  std::size_t clean = 0;
  for (double x : xs) clean += x < 5.0;
  const double band = 4.0 * std::sqrt(0.3 * 0.7 / double(n));
  CHECK(std::abs(double(clean) / double(n) - 0.7) <= band);
}

TEST_CASE("multivariate draws and cf") {
  ContaminationModel m{BaseDistribution::gaussian(2), {0.5, -0.5}, 0.2,
                       PointShift{{3.0, 4.0}}};
  m.validate();
  std::vector<double> xs;
  Rng rng(55);
  const std::size_t n = 100000;
  m.draw(rng, n, xs);
  Rng wrng(56);
  for (int it = 0; it < 10; ++it) {
    const double om[2] = {wrng.uniform_pm1(), wrng.uniform_pm1()};
    CHECK(std::abs(ecf(xs, 2, om) - m.observed_cf(om)) <=
          5.0 / std::sqrt(double(n)));
  }
}

TEST_CASE("draw determinism") {
  const auto m = gaussian_point_model(0.25, 0.1, -3.0);
  std::vector<double> a, b, c;
  Rng r1(8), r2(8), r3(9);
  m.draw(r1, 5000, a);
  m.draw(r2, 5000, b);
  m.draw(r3, 5000, c);
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("validation rejects malformed models") {
  ContaminationModel bad_alpha{BaseDistribution::gaussian(1), {0.0}, 0.6,
                               PointShift{{1.0}}};
  CHECK_THROWS_AS(bad_alpha.validate(), std::invalid_argument);

  ContaminationModel bad_dim{BaseDistribution::gaussian(2), {0.0}, 0.1,
                             PointShift{{1.0, 1.0}}};
  CHECK_THROWS_AS(bad_dim.validate(), std::invalid_argument);

  ContaminationModel bad_shift{BaseDistribution::gaussian(2), {0.0, 0.0}, 0.1,
                               PointShift{{1.0}}};
  CHECK_THROWS_AS(bad_shift.validate(), std::invalid_argument);

  ContaminationModel bad_probs{
      BaseDistribution::gaussian(1), {0.0}, 0.1,
      MixtureOfPoints{{{{1.0}, 0.5}, {{2.0}, 0.6}}}};
  CHECK_THROWS_AS(bad_probs.validate(), std::invalid_argument);

  ContaminationModel unsorted{BaseDistribution::gaussian(1), {0.0}, 0.1,
                              AtomicMeasure1D{{1.0, -1.0}, {0.5, 0.5}}};
  CHECK_THROWS_AS(unsorted.validate(), std::invalid_argument);

  // alpha = 0 stays valid for internal use.
  ContaminationModel degenerate{BaseDistribution::gaussian(1), {0.0}, 0.0,
                                PointShift{{1.0}}};
  CHECK_NOTHROW(degenerate.validate());
}

TEST_CASE("model json round trip") {
  std::vector<Adversary> adversaries{
      PointShift{{1.0, -2.0}},
      MixtureOfPoints{{{{0.5, 0.5}, 0.4}, {{1.5, -0.5}, 0.6}}},
      NullAdversary{}};
  for (const auto& adv : adversaries) {
    ContaminationModel m{BaseDistribution::laplace(2), {0.1, 0.2}, 0.3, adv};
    m.validate();
    const auto back = ContaminationModel::from_json(m.to_json());
    CHECK(back.base == m.base);
    CHECK(back.mean == m.mean);
    CHECK(back.alpha == m.alpha);
    CHECK(adversary_label(back.adversary) == adversary_label(m.adversary));
  }
  ContaminationModel atom{BaseDistribution::uniform(), {0.0}, 0.2,
                          AtomicMeasure1D{{-1.0, 1.0}, {0.5, 0.5}}};
  atom.validate();
  const auto back = ContaminationModel::from_json(atom.to_json());
  CHECK(std::get<AtomicMeasure1D>(back.adversary).locations ==
        std::vector<double>{-1.0, 1.0});
}

TEST_CASE("sample csv round trip") {
  ContaminationModel m{BaseDistribution::gaussian(2), {0.1, -0.2}, 0.2,
                       PointShift{{2.0, 2.0}}};
  m.validate();
  std::vector<double> xs;
  Rng rng(21);
  m.draw(rng, 500, xs);
  const std::string path = "test_samples_roundtrip.csv";
  write_samples_csv(path, m, 21, xs);
  int dim = 0;
  const auto back = read_samples_csv(path, dim);
  CHECK(dim == 2);
  CHECK(back == xs);
  std::remove(path.c_str());
}
