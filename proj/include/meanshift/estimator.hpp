#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

#include "meanshift/cover.hpp"
#include "meanshift/distributions.hpp"

namespace meanshift {

enum class CfMode { oracle, empirical };

struct EstimatorConfig {
  double epsilon = 0.0;          // target accuracy, in (0, 1)
  double alpha = 0.0;            // outlier fraction, in (0, 1/2)
  double radius = 1.5;           // candidate ball radius, > 1
  double sin_level = 0.0;        // witness sine level A, in (0, 1]
  double cf_level = 0.0;         // witness CF level delta, in (0, 1]
  double cf_slope = 0.0;         // Lipschitz bound for the base CF gradient
  double deriv_l1 = 0.0;         // density derivative L1 bound
  double budget_constant = 64.0;
  CfMode cf_mode = CfMode::oracle;
  std::size_t clean_count = 0;   // reference draws when cf_mode == empirical
  std::size_t cover_cap = 10'000'000;
  bool precenter = true;
  std::vector<double> candidate_offset;  // optional shift of the candidate grid
  bool trace = false;

  // Requires (1 - alpha) * sin_level - 2 * alpha > 0; empirical mode requires
  // clean_count large enough that the lowered search threshold stays positive.
  void validate(int dim) const;

  nlohmann::json to_json() const;
  static EstimatorConfig from_json(const nlohmann::json& j);
};

// Frequencies with base CF magnitude at least cf_level sit inside the ball of
// radius witness_norm_bound(deriv_l1, cf_level, dim); these two resolutions
// make the discretized tournament lose at most half the detection margin.
double candidate_resolution(const EstimatorConfig& cfg, int dim);
double frequency_resolution(const EstimatorConfig& cfg);

// ceil(C d log(B R L / (delta A)) / (((1-alpha) A - 2 alpha) delta)^2).
std::size_t sample_budget(const EstimatorConfig& cfg, int dim);

// Componentwise median (mean of middle two for even counts).
std::vector<double> coordinate_median(std::span<const double> samples, int dim);

// (1/n) sum_i exp(2 pi i <omega, x_i>).
std::complex<double> empirical_cf(std::span<const double> samples, int dim,
                                  std::span<const double> omega);

struct EstimateReport {
  std::vector<double> mean;
  double score = 0.0;
  std::size_t samples_used = 0;
  std::size_t candidate_count = 0;
  std::size_t frequency_count = 0;
  std::size_t search_set_size = 0;
  bool search_set_empty = false;
  std::vector<double> precenter_shift;
  std::vector<double> candidate_scores;  // filled when cfg.trace

  nlohmann::json to_json() const;
};

// Frequency-scan tournament: precenter, discretize candidates and frequencies,
// keep frequencies where the base CF is visible, score each candidate by the
// worst frequency mismatch, return the lowest-scoring candidate (first in
// lexicographic order on ties). clean_samples feeds the empirical CF mode.
EstimateReport estimate(const EstimatorConfig& cfg, const BaseDistribution& dist,
                        std::span<const double> samples,
                        std::span<const double> clean_samples = {});

// Ready-to-run configuration for a noise preset at the given contamination
// level and accuracy target. cf_level_floor trades theoretical slack for
// tractable cover sizes; 0 disables the floor.
EstimatorConfig preset_config(const BaseDistribution& dist, double alpha,
                              double epsilon, double radius = 1.5,
                              double budget_constant = 64.0,
                              double cf_level_floor = 0.08);

namespace detail {

// Empirical CF over the frequency set {pitch * k : k in ks}; ks sorted.
// One sincos per sample plus a rotation recurrence across k.
std::vector<std::complex<double>> ecf_grid_1d(std::span<const double> xs,
                                              double pitch,
                                              const std::vector<long long>& ks);

// Indices of values with magnitude >= threshold.
std::vector<std::size_t> select_search_set(
    const std::vector<std::complex<double>>& cf_values, double threshold);

}  // namespace detail

}  // namespace meanshift
