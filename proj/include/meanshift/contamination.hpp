#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "meanshift/distributions.hpp"

namespace meanshift {

class Rng;

// Outlier-shift laws. An outlier sample is z + y with y from the base noise
// and z drawn from the law below; clean samples are mean + y.
struct PointShift {
  std::vector<double> shift;
};
struct MixtureAtom {
  std::vector<double> location;
  double prob = 0.0;
};
struct MixtureOfPoints {
  std::vector<MixtureAtom> atoms;  // probs nonnegative, sum to 1
};
struct AtomicMeasure1D {
  std::vector<double> locations;  // strictly increasing
  std::vector<double> probs;      // nonnegative, sum to 1
};
// Outliers shifted by the clean mean itself: contamination is invisible.
struct NullAdversary {};

using Adversary =
    std::variant<PointShift, MixtureOfPoints, AtomicMeasure1D, NullAdversary>;

std::string adversary_label(const Adversary& a);
std::complex<double> adversary_cf(const Adversary& a,
                                  std::span<const double> omega,
                                  std::span<const double> mean);
nlohmann::json adversary_to_json(const Adversary& a);
Adversary adversary_from_json(const nlohmann::json& j);

struct ContaminationModel {
  BaseDistribution base;
  std::vector<double> mean;
  double alpha = 0.0;  // outlier fraction, in [0, 1/2)
  Adversary adversary = NullAdversary{};

  void validate() const;

  // Appends n draws. Words consumed per sample: 1 for the outlier coin, then
  // (only on an outlier, only for random adversaries) 1 for the atom pick,
  // then the base distribution's per-sample count.
  void draw(Rng& rng, std::size_t n, std::vector<double>& out) const;

  // cf_base(w) * shift_mixture_cf(w).
  std::complex<double> observed_cf(std::span<const double> omega) const;

  // (1-alpha) e^{2 pi i <w, mean>} + alpha cf_outlier(w).
  std::complex<double> shift_mixture_cf(std::span<const double> omega) const;

  nlohmann::json to_json() const;
  static ContaminationModel from_json(const nlohmann::json& j);
};

// CSV with a leading "# seed=..." comment and one sample per row.
void write_samples_csv(const std::string& path, const ContaminationModel& model,
                       std::uint64_t seed, std::span<const double> samples);
std::vector<double> read_samples_csv(const std::string& path, int& dim);

}  // namespace meanshift
